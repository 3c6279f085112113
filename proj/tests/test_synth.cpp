#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "puckweight/glm.hpp"
#include "puckweight/pipeline.hpp"
#include "puckweight/stats.hpp"
#include "puckweight/synth.hpp"
#include "test_util.hpp"

using namespace puckweight;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("synth: identical seeds produce byte-identical files") {
  synth::SynthConfig config;
  config.seed = 5150;
  config.teams = 4;
  config.n_games = 8;
  config.goalie_skill_sd = 0.1;
  config.player_offense_sd = 1.0;
  config.defense_quality_spread = 6.0;

  auto dir1 = std::filesystem::temp_directory_path() / "pw_synth_a";
  auto dir2 = std::filesystem::temp_directory_path() / "pw_synth_b";
  auto p1 = synth::generate_files(config, dir1);
  auto p2 = synth::generate_files(config, dir2);
  CHECK(slurp(p1.events) == slurp(p2.events));
  CHECK(slurp(p1.shifts) == slurp(p2.shifts));
  CHECK(slurp(p1.truth) == slurp(p2.truth));

  synth::SynthConfig other = config;
  other.seed = 5151;
  auto p3 = synth::generate_files(other, dir2);
  CHECK(slurp(p1.events) != slurp(p3.events));
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("synth: generated files load through the full pipeline") {
  synth::SynthConfig config;
  config.seed = 77;
  config.teams = 4;
  config.n_games = 10;
  auto dir = std::filesystem::temp_directory_path() / "pw_synth_load";
  auto paths = synth::generate_files(config, dir);
  auto data = load_dataset(paths.events, paths.shifts);
  CHECK(data.games.size() == 10);
  CHECK(!data.eligible.empty());
  // Every game has two teams and a full clock of intervals.
  for (const auto& [gid, game] : data.games) {
    CHECK(!game.away_team.empty());
    CHECK(game.end == 3600);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("synth: intercept-only truth hits the expected goal rate") {
  synth::SynthConfig config;
  config.seed = 2112;
  config.teams = 4;
  config.n_games = 840;
  config.shot_rate = 60.0;
  config.true_coefficients = {{"(Intercept)", -1.333}};
  auto result = synth::generate(config);

  std::int64_t shots = 0, goals = 0;
  for (const auto& e : result.events) {
    if (!e.is_on_goal() || e.zone != ZoneKind::Offensive || !e.goalie_on_ice) {
      continue;
    }
    shots += 1;
    goals += e.kind == EventKind::Goal ? 1 : 0;
  }
  REQUIRE(shots >= 100000);
  double p = glm::logistic(-1.333);
  double rate = static_cast<double>(goals) / static_cast<double>(shots);
  double sigma = std::sqrt(p * (1 - p) / static_cast<double>(shots));
  CHECK(std::abs(rate - p) < 3 * sigma);
}

TEST_CASE("synth: null goalie skill centers goals prevented at zero") {
  synth::SynthConfig config;
  config.seed = 314;
  config.teams = 6;
  config.n_games = 45;
  auto gen = synth::generate(config);

  glm::FittedModel truth;
  for (const auto& [name, v] : gen.truth.coefficients) {
    truth.predictor_names.push_back(name);
  }
  truth.coefficients.resize(
      static_cast<Eigen::Index>(truth.predictor_names.size()));
  for (Eigen::Index i = 0; i < truth.coefficients.size(); ++i) {
    truth.coefficients(i) =
        gen.truth.coefficients.at(truth.predictor_names[
            static_cast<std::size_t>(i)]);
  }
  truth.covariance = Eigen::MatrixXd::Zero(truth.coefficients.size(),
                                           truth.coefficients.size());
  auto scored = score_dataset(
      build_dataset(std::move(gen.events), std::move(gen.shifts)),
      std::move(truth));

  stats::StatScope scope;
  scope.strengths = {Strength::EV55, Strength::EV44, Strength::PP54,
                     Strength::PP53, Strength::SH45, Strength::SH35};
  auto lines = stats::goalie_stats(scored, scope,
                                   stats::league_save_pct(scored, scope));
  REQUIRE(lines.size() == 6);
  // Sum of diff_ga is sum over shots of (p_true - y); compare against the
  // binomial scale.
  double total = 0.0, var = 0.0;
  for (const auto& l : lines) {
    total += l.diff_ga;
    var += l.g_err * l.g_err;
  }
  CHECK(std::abs(total) < 4.0 * std::sqrt(var));
}

TEST_CASE("synth: marginals stay inside their configured ranges") {
  synth::SynthConfig config;
  config.seed = 999;
  config.teams = 4;
  config.n_games = 30;
  config.defense_quality_spread = 8.0;
  auto gen = synth::generate(config);
  auto data = build_dataset(std::move(gen.events), std::move(gen.shifts));

  std::set<ShotType> types;
  std::set<Strength> strengths;
  for (const auto& shot : data.eligible) {
    CHECK(shot.fv.distance >= 0.0);
    CHECK(shot.fv.distance <= 90.0);
    CHECK(shot.fv.angle >= 0.0);
    CHECK(shot.fv.angle <= 90.0);
    CHECK(shot.fv.shooter_fatigue >= 0.0);
    CHECK(shot.fv.shooter_fatigue <= 70.0);
    types.insert(shot.fv.shot_type);
    strengths.insert(shot.fv.strength);
  }
  CHECK(types.size() == 6);
  CHECK(strengths.size() == 6);

  // The latent tables cover the whole league.
  CHECK(gen.truth.goalie_skill.size() == 4);
  CHECK(gen.truth.player_effect.size() == 4u * 15u);
  CHECK(gen.truth.team_defense_shift.size() == 4);
}
