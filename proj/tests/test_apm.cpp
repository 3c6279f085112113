#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "puckweight/apm.hpp"
#include "puckweight/errors.hpp"
#include "puckweight/pipeline.hpp"
#include "puckweight/synth.hpp"
#include "test_util.hpp"

using namespace puckweight;
using apm::ApmObservation;
using apm::OutcomeKind;

namespace {

glm::FittedModel constant_model(double p) {
  glm::FittedModel model;
  model.predictor_names = {"(Intercept)"};
  model.coefficients = Eigen::VectorXd::Constant(1, std::log(p / (1.0 - p)));
  model.covariance = Eigen::MatrixXd::Zero(1, 1);
  model.converged = true;
  return model;
}

ScoredDataset one_game_dataset(Seconds change_at = 0) {
  std::vector<ShiftRecord> shifts;
  Seconds length = 1200;
  for (int i = 1; i <= 5; ++i) {
    std::string hp = "H" + std::to_string(i);
    if (i == 1 && change_at > 0) {
      shifts.push_back({"G1", "H1a", "HOME", PlayerPosition::Forward, 0,
                        change_at});
      shifts.push_back({"G1", "H1b", "HOME", PlayerPosition::Forward,
                        change_at, length});
    } else {
      shifts.push_back({"G1", hp, "HOME", PlayerPosition::Forward, 0, length});
    }
    shifts.push_back({"G1", "A" + std::to_string(i), "AWAY",
                      PlayerPosition::Forward, 0, length});
  }
  shifts.push_back({"G1", "HG", "HOME", PlayerPosition::Goalie, 0, length});
  shifts.push_back({"G1", "AG", "AWAY", PlayerPosition::Goalie, 0, length});

  ShotEvent faceoff;
  faceoff.game_id = "G1";
  faceoff.season = "2008";
  faceoff.event_index = 0;
  faceoff.period = 1;
  faceoff.clock = 0;
  faceoff.kind = EventKind::Other;
  faceoff.shooter_team = "HOME";
  faceoff.home_team = "HOME";
  faceoff.zone = ZoneKind::Neutral;
  std::vector<ShotEvent> events = {faceoff};
  return score_dataset(build_dataset(std::move(events), std::move(shifts)),
                       constant_model(0.1));
}

Eigen::SparseMatrix<double> dense_to_sparse(const Eigen::MatrixXd& D) {
  Eigen::SparseMatrix<double> X(D.rows(), D.cols());
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index i = 0; i < D.rows(); ++i) {
    for (Eigen::Index j = 0; j < D.cols(); ++j) {
      if (D(i, j) != 0.0) {
        trip.emplace_back(static_cast<int>(i), static_cast<int>(j), D(i, j));
      }
    }
  }
  X.setFromTriplets(trip.begin(), trip.end());
  return X;
}

}  // namespace

TEST_CASE("observations: a full period with no substitutions is one block") {
  auto scored = one_game_dataset();
  auto obs = apm::build_observations(scored);
  REQUIRE(obs.size() == 1);
  CHECK(obs[0].start == 0);
  CHECK(obs[0].end == 1200);
  CHECK(obs[0].duration() == 1200);
  CHECK(obs[0].home_skaters.size() == 5);
  CHECK(obs[0].situation == apm::ObsSituation::EV);
  CHECK(obs[0].zone_start_home == ZoneKind::Neutral);
}

TEST_CASE("observations: a single line change splits the period") {
  auto scored = one_game_dataset(45);
  auto obs = apm::build_observations(scored);
  REQUIRE(obs.size() == 2);
  CHECK(obs[0].start == 0);
  CHECK(obs[0].end == 45);
  CHECK(obs[1].start == 45);
  CHECK(obs[1].end == 1200);
}

TEST_CASE("observations partition every synth game exactly") {
  synth::SynthConfig config;
  config.seed = 52;
  config.teams = 4;
  config.n_games = 12;
  auto gen = synth::generate(config);
  auto scored =
      score_dataset(build_dataset(std::move(gen.events), std::move(gen.shifts)),
                    constant_model(0.1));
  auto obs = apm::build_observations(scored);

  std::map<std::string, Seconds> total;
  std::map<std::string, Seconds> cursor;
  for (const auto& o : obs) {
    // no gaps, no overlap
    auto it = cursor.find(o.game_id);
    if (it == cursor.end()) {
      CHECK(o.start == 0);
    } else {
      CHECK(o.start == it->second);
    }
    CHECK(o.duration() > 0);
    cursor[o.game_id] = o.end;
    total[o.game_id] += o.duration();
  }
  CHECK(total.size() == 12);
  for (const auto& [gid, sum] : total) {
    CHECK(sum == 3600);
    CHECK(cursor[gid] == 3600);
  }
}

TEST_CASE("observations tally outcomes and model weights") {
  auto scored = one_game_dataset();
  // Rebuild with one goal and one missed shot inside the period.
  std::vector<ShotEvent> events = scored.data.events;
  auto shot = testutil::make_shot("G1", 1, 60, 80, 2, EventKind::Goal,
                                  ShotType::Wrist, "H1");
  auto missed = testutil::make_shot("G1", 2, 80, 75, 1, EventKind::MissedShot,
                                    ShotType::Wrist, "A1", "AWAY");
  missed.shot_type.reset();
  missed.goalie_id = "HG";
  events.push_back(shot);
  events.push_back(missed);
  auto rescored = score_dataset(
      build_dataset(std::move(events),
                    std::vector<ShiftRecord>(scored.data.shifts)),
      constant_model(0.1));
  auto obs = apm::build_observations(rescored);
  REQUIRE(obs.size() == 1);
  CHECK(obs[0].home.goals == 1);
  CHECK(obs[0].home.shots == 1);
  CHECK(obs[0].home.wshots == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(obs[0].away.fenwick == 1);
  CHECK(obs[0].away.shots == 0);
  CHECK(obs[0].away.corsi == 1);
}

TEST_CASE("observations reject events outside the covered clock") {
  auto scored = one_game_dataset();
  std::vector<ShotEvent> events = scored.data.events;
  ShotEvent stray = events[0];
  stray.event_index = 9;
  stray.clock = 5000;  // beyond every shift
  stray.period = 5;
  events.push_back(stray);
  auto rescored = score_dataset(
      build_dataset(std::move(events),
                    std::vector<ShiftRecord>(scored.data.shifts)),
      constant_model(0.1));
  CHECK_THROWS_AS(apm::build_observations(rescored), Error);
}

TEST_CASE("design: two observations become four rows") {
  auto scored = one_game_dataset(600);
  auto obs = apm::build_observations(scored);
  REQUIRE(obs.size() == 2);
  apm::DesignOptions opt;
  auto design = apm::build_design(obs, opt);
  CHECK(design.y.size() == 4);
  CHECK(design.w.sum() == doctest::Approx(2 * 1200.0));

  // Each row: intercept + 5 offense + 5 defense indicators (+ zone if any).
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(design.X.cols());
  for (Eigen::Index r = 0; r < design.y.size(); ++r) {
    int player_nnz = 0;
    for (int k = 0; k < design.X.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(design.X, k); it;
           ++it) {
        if (it.row() == r &&
            static_cast<std::size_t>(it.col()) >= design.offense_start) {
          ++player_nnz;
        }
      }
    }
    CHECK(player_nnz == 10);
  }
}

TEST_CASE("design: per-60 response and duration weight") {
  ApmObservation obs;
  obs.game_id = "G1";
  obs.start = 0;
  obs.end = 120;
  obs.home_skaters = {"H1", "H2", "H3", "H4", "H5"};
  obs.away_skaters = {"A1", "A2", "A3", "A4", "A5"};
  obs.home.goals = 1;
  std::vector<ApmObservation> v = {obs};
  apm::DesignOptions opt;
  opt.zone_indicators = false;
  auto design = apm::build_design(v, opt);
  REQUIRE(design.y.size() == 2);
  CHECK(design.y(0) == doctest::Approx(30.0));  // 1 goal in 120 s
  CHECK(design.y(1) == 0.0);
  CHECK(design.w(0) == 120.0);
}

TEST_CASE("design: zone indicators flip for the away-offense row") {
  ApmObservation obs;
  obs.game_id = "G1";
  obs.start = 0;
  obs.end = 100;
  obs.home_skaters = {"H1", "H2", "H3", "H4", "H5"};
  obs.away_skaters = {"A1", "A2", "A3", "A4", "A5"};
  obs.zone_start_home = ZoneKind::Offensive;
  std::vector<ApmObservation> v = {obs};
  auto design = apm::build_design(v, apm::DesignOptions{});
  Eigen::MatrixXd D(design.X);
  CHECK(D(0, 1) == 1.0);  // home offense starts in its offensive zone
  CHECK(D(0, 2) == 0.0);
  CHECK(D(1, 1) == 0.0);  // the same faceoff is defensive for the away side
  CHECK(D(1, 2) == 1.0);
}

TEST_CASE("design: roster members with no observations warn and drop") {
  auto scored = one_game_dataset();
  auto obs = apm::build_observations(scored);
  apm::DesignOptions opt;
  opt.roster = {"GHOST", "H1"};
  auto design = apm::build_design(obs, opt);
  REQUIRE(design.warnings.size() == 1);
  CHECK(design.warnings[0].find("GHOST") != std::string::npos);
  for (const auto& name : design.col_names) {
    CHECK(name.find("GHOST") == std::string::npos);
  }
}

TEST_CASE("ridge: identity design interpolates the response") {
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(5, 5);
  Eigen::VectorXd y(5);
  y << 3, -1, 4, 1, -5;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(5);
  auto beta = apm::ridge_solve(dense_to_sparse(I), y, w,
                               std::vector<bool>(5, false), 0.0);
  CHECK((beta - y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ridge: penalized norm shrinks monotonically in lambda") {
  std::mt19937 rng(31);
  std::normal_distribution<double> normal(0.0, 1.0);
  int n = 60, p = 8;
  Eigen::MatrixXd D(n, p);
  Eigen::VectorXd y(n), w(n);
  for (int i = 0; i < n; ++i) {
    D(i, 0) = 1.0;
    for (int j = 1; j < p; ++j) D(i, j) = normal(rng);
    y(i) = normal(rng) * 3.0;
    w(i) = 0.5 + std::abs(normal(rng));
  }
  std::vector<bool> pen(p, true);
  pen[0] = false;
  auto X = dense_to_sparse(D);
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {0.01, 0.1, 1.0, 10.0, 100.0, 1e4, 1e6}) {
    auto beta = apm::ridge_solve(X, y, w, pen, lambda);
    double norm = beta.tail(p - 1).norm();
    CHECK(norm <= prev + 1e-12);
    prev = norm;
  }
  auto huge = apm::ridge_solve(X, y, w, pen, 1e12);
  CHECK(huge.tail(p - 1).norm() < 1e-6);
}

TEST_CASE("ridge: matches the dense closed form and weighted OLS") {
  std::mt19937 rng(77);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pd(2, 50);
  for (int trial = 0; trial < 50; ++trial) {
    int p = pd(rng);
    int n = p + 30;
    Eigen::MatrixXd D(n, p);
    Eigen::VectorXd y(n), w(n);
    for (int i = 0; i < n; ++i) {
      D(i, 0) = 1.0;
      for (int j = 1; j < p; ++j) {
        // indicator-flavored columns with a touch of noise
        D(i, j) = (rng() % 3 == 0 ? 1.0 : 0.0) + 0.01 * normal(rng);
      }
      y(i) = normal(rng) * 2.0;
      w(i) = 0.25 + std::abs(normal(rng));
    }
    std::vector<bool> pen(static_cast<std::size_t>(p), true);
    pen[0] = false;
    double lambda = 0.5 + 5.0 * std::abs(normal(rng));
    auto X = dense_to_sparse(D);
    auto beta = apm::ridge_solve(X, y, w, pen, lambda);

    // Dense closed form via an independent factorization.
    Eigen::MatrixXd A = D.transpose() * w.asDiagonal() * D;
    for (int j = 1; j < p; ++j) A(j, j) += lambda;
    Eigen::VectorXd b = D.transpose() * (w.asDiagonal() * y);
    Eigen::VectorXd oracle = A.fullPivLu().solve(b);
    CHECK((beta - oracle).cwiseAbs().maxCoeff() < 1e-8);

    // Normal-equation residual bound.
    Eigen::VectorXd resid = b - D.transpose() * (w.asDiagonal() * (D * beta));
    for (int j = 0; j < p; ++j) {
      if (pen[static_cast<std::size_t>(j)]) resid(j) -= lambda * beta(j);
    }
    double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    CHECK(resid.cwiseAbs().maxCoeff() < 1e-8 * scale);

    // Vanishing penalty converges to weighted least squares.
    auto near_zero = apm::ridge_solve(X, y, w, pen, 1e-10);
    Eigen::VectorXd wls =
        (w.cwiseSqrt().asDiagonal() * D)
            .colPivHouseholderQr()
            .solve(w.cwiseSqrt().cwiseProduct(y));
    CHECK((near_zero - wls).cwiseAbs().maxCoeff() /
              std::max(1.0, wls.cwiseAbs().maxCoeff()) <
          1e-5);
  }
}

TEST_CASE("ridge: lambda 0 on a rank-deficient design raises") {
  Eigen::MatrixXd D(10, 3);
  std::mt19937 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd y(10), w = Eigen::VectorXd::Ones(10);
  for (int i = 0; i < 10; ++i) {
    D(i, 0) = 1.0;
    D(i, 1) = normal(rng);
    D(i, 2) = D(i, 1);
    y(i) = normal(rng);
  }
  CHECK_THROWS_AS(apm::ridge_solve(dense_to_sparse(D), y, w,
                                   std::vector<bool>(3, true), 0.0),
                  Error);
  // A positive penalty restores solvability.
  auto beta = apm::ridge_solve(dense_to_sparse(D), y, w,
                               std::vector<bool>(3, true), 1.0);
  CHECK(beta.allFinite());
}

TEST_CASE("ridge: scaling responses scales coefficients, order intact") {
  synth::SynthConfig config;
  config.seed = 61;
  config.teams = 4;
  config.n_games = 10;
  auto gen = synth::generate(config);
  auto scored =
      score_dataset(build_dataset(std::move(gen.events), std::move(gen.shifts)),
                    constant_model(0.1));
  auto obs = apm::build_observations(scored);
  apm::DesignOptions opt;
  opt.outcome = OutcomeKind::Shots;
  auto design = apm::build_design(obs, opt);
  auto beta1 = apm::ridge_solve(design.X, design.y, design.w, design.penalized,
                                100.0);
  auto beta3 = apm::ridge_solve(design.X, 3.0 * design.y, design.w,
                                design.penalized, 100.0);
  CHECK((beta3 - 3.0 * beta1).cwiseAbs().maxCoeff() <
        1e-8 * std::max(1.0, beta1.cwiseAbs().maxCoeff()));

  std::vector<int> order1(static_cast<std::size_t>(beta1.size()));
  std::vector<int> order3(order1.size());
  std::iota(order1.begin(), order1.end(), 0);
  std::iota(order3.begin(), order3.end(), 0);
  std::sort(order1.begin(), order1.end(),
            [&](int a, int b) { return beta1(a) > beta1(b); });
  std::sort(order3.begin(), order3.end(),
            [&](int a, int b) { return beta3(a) > beta3(b); });
  CHECK(order1 == order3);
}

TEST_CASE("fit_apm produces per-situation rates and totals") {
  synth::SynthConfig config;
  config.seed = 62;
  config.teams = 4;
  config.n_games = 24;
  auto gen = synth::generate(config);
  auto scored =
      score_dataset(build_dataset(std::move(gen.events), std::move(gen.shifts)),
                    constant_model(0.1));
  auto obs = apm::build_observations(scored);
  apm::ApmOptions opt;
  opt.lambda = 200.0;
  opt.outcomes = {OutcomeKind::Goals, OutcomeKind::Wshots};
  auto result = apm::fit_apm(obs, scored.data, opt);
  CHECK(!result.players.empty());
  for (const auto& [pid, p] : result.players) {
    CHECK(p.toi.count(apm::Situation::EV));
    for (const auto& [sit, rates] : p.off) {
      for (const auto& [o, v] : rates) CHECK(std::isfinite(v));
    }
    CHECK(p.total_off.count(OutcomeKind::Goals));
  }
  auto table = apm::apm_table(result, apm::ApmSide::Offense);
  CHECK(table.columns[3] == "G");
  CHECK(table.columns[4] == "W");
  CHECK(table.rows.size() == result.players.size());
}

TEST_CASE("wowy: fixture arithmetic") {
  Dataset data;
  GameInfo g;
  g.game_id = "G1";
  g.home_team = "HOME";
  g.away_team = "AWAY";
  data.games["G1"] = g;
  data.players["P"] = {PlayerPosition::Forward, "HOME"};

  // On: 59 goals in 60000 s -> 3.54 per 60; off: 251 in 360000 -> 2.51.
  ApmObservation on;
  on.game_id = "G1";
  on.start = 0;
  on.end = 60000;
  on.home_skaters = {"P", "Q", "R", "S", "T"};
  on.away_skaters = {"a", "b", "c", "d", "e"};
  on.home.goals = 59;
  ApmObservation off = on;
  off.start = 60000;
  off.end = 420000;
  off.home_skaters = {"Q", "R", "S", "T", "U"};
  off.away.goals = 0;
  off.home.goals = 251;
  std::vector<ApmObservation> obs = {on, off};

  auto r = apm::wowy(obs, data, "P", OutcomeKind::Goals);
  CHECK(r.on_rate == doctest::Approx(3.54).epsilon(1e-12));
  CHECK(r.off_rate == doctest::Approx(2.51).epsilon(1e-12));
  CHECK(r.diff == doctest::Approx(1.03).epsilon(1e-9));

  // Weighted-shot outcomes flow through the same formula.
  std::vector<ApmObservation> obs_w = obs;
  obs_w[0].home.wshots = 118.0;  // 7.08 per 60
  obs_w[1].home.wshots = 502.0;  // 5.02 per 60
  auto rw = apm::wowy(obs_w, data, "P", OutcomeKind::Wshots);
  CHECK(rw.diff == doctest::Approx(7.08 - 5.02).epsilon(1e-9));

  // A player on the ice for every second has no off-ice rate.
  std::vector<ApmObservation> always = {on};
  CHECK_THROWS_AS(apm::wowy(always, data, "P", OutcomeKind::Goals), Error);
}

TEST_CASE("cross-validated lambda comes from the grid, deterministically") {
  synth::SynthConfig config;
  config.seed = 63;
  config.teams = 4;
  config.n_games = 12;
  auto gen = synth::generate(config);
  auto scored =
      score_dataset(build_dataset(std::move(gen.events), std::move(gen.shifts)),
                    constant_model(0.1));
  auto obs = apm::build_observations(scored);
  apm::DesignOptions opt;
  opt.outcome = OutcomeKind::Shots;
  std::vector<double> grid = {10.0, 100.0, 1000.0};
  double best1 = apm::cross_validate_lambda(obs, opt, grid, 3);
  double best2 = apm::cross_validate_lambda(obs, opt, grid, 3);
  CHECK(best1 == best2);
  CHECK(std::find(grid.begin(), grid.end(), best1) != grid.end());
}

TEST_CASE("design dump round-trips the matrix shape") {
  auto scored = one_game_dataset(300);
  auto obs = apm::build_observations(scored);
  auto design = apm::build_design(obs, apm::DesignOptions{});
  std::ostringstream out;
  apm::write_design(out, design);
  std::string text = out.str();
  CHECK(text.rfind(apm::kDesignVersionLine, 0) == 0);
  CHECK(text.find("rows 4 cols") != std::string::npos);
  CHECK(text.find("off_H1a") != std::string::npos);
  CHECK(text.find("def_A1") != std::string::npos);
}
