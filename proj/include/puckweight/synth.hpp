#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "puckweight/types.hpp"

namespace puckweight::synth {

// Ground-truth coefficients used when a config supplies none.
const std::map<std::string, double>& default_true_coefficients();

struct SynthConfig {
  std::uint64_t seed = 1;
  int n_games = 40;
  int teams = 4;
  int players_per_team = 15;  // skaters; one goalie per team on top
  double shot_rate = 55.0;    // on-goal attempts per team per game
  std::map<std::string, double> true_coefficients;  // empty -> defaults

  // Latent structure. Goalie skill is a logit offset subtracted from each
  // faced shot's linear predictor; player effects shift their team's shot
  // rate (per 60) while on the ice; the defense shift moves opponent shot
  // distances (feet), varying the shot-quality mix a goalie sees.
  double goalie_skill_sd = 0.0;
  double player_offense_sd = 0.0;
  double defense_quality_spread = 0.0;

  double rebound_prob = 0.12;
  double missed_frac = 0.25;
  double blocked_frac = 0.20;
  double neutral_frac = 0.02;
  double empty_net_frac = 0.01;
  std::string season = "2008";
};

struct TruthRecord {
  std::map<std::string, double> coefficients;
  std::map<std::string, double> goalie_skill;
  std::map<std::string, double> player_effect;
  std::map<std::string, double> team_defense_shift;
};

struct SynthResult {
  std::vector<ShotEvent> events;
  std::vector<ShiftRecord> shifts;
  TruthRecord truth;
};

// Deterministic for a fixed config: per-game streams derive from the seed,
// and goal labels are drawn from the same feature pipeline the fit uses.
SynthResult generate(const SynthConfig& config);

inline constexpr const char* kTruthVersionLine = "#puckweight-truth v1";
void write_truth(std::ostream& out, const SynthConfig& config,
                 const TruthRecord& truth);

struct SynthPaths {
  std::filesystem::path events;
  std::filesystem::path shifts;
  std::filesystem::path truth;
};

SynthPaths generate_files(const SynthConfig& config,
                          const std::filesystem::path& out_dir);

}  // namespace puckweight::synth
