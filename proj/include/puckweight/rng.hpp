#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace puckweight {

// splitmix64. Counter-based, trivially splittable, and the seed -> output
// mapping is fixed by the algorithm itself, so generated fixtures are stable
// across platforms and standard-library versions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Derive an independent stream, e.g. one per game.
  static std::uint64_t child_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 s(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
    return s.next();
  }

 private:
  std::uint64_t state_;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t bits() { return gen_.next(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be > 0; modulo bias is irrelevant at
  // the n used here.
  std::uint64_t below(std::uint64_t n) { return gen_.next() % n; }

  bool bernoulli(double p) { return uniform() < p; }

  // Box-Muller; second value discarded to keep the stream position simple.
  double normal(double mean = 0.0, double sd = 1.0) {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(6.283185307179586 * u2);
  }

  // Index into a discrete distribution given by non-negative weights.
  std::size_t weighted(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

 private:
  SplitMix64 gen_;
};

}  // namespace puckweight
