#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "puckweight/errors.hpp"
#include "puckweight/features.hpp"
#include "puckweight/ingest.hpp"
#include "puckweight/synth.hpp"
#include "test_util.hpp"

using namespace puckweight;
using features::shot_geometry;
using features::ShotSide;
using testutil::make_shot;

namespace {

// Coordinates at an exact distance/angle from the goal mouth.
std::pair<double, double> at(double dist, double angle_deg, double side) {
  double rad = angle_deg * 0.017453292519943295;
  return {features::kGoalX - dist * std::cos(rad),
          side * dist * std::sin(rad)};
}

}  // namespace

TEST_CASE("geometry: straight-on shot") {
  auto g = shot_geometry(features::kGoalX - 13.0, 0.0);
  CHECK(g.distance == doctest::Approx(13.0));
  CHECK(g.angle_deg == 0.0);
  CHECK(g.side == ShotSide::Center);
}

TEST_CASE("geometry: 10 ft out, 10 ft lateral") {
  // Independ: angle = atan(10/10) in degrees, distance by Pythagoras.
  double expected_angle = std::atan(1.0) * 180.0 / M_PI;
  double expected_distance = std::sqrt(10.0 * 10.0 + 10.0 * 10.0);
  auto g = shot_geometry(features::kGoalX - 10.0, 10.0);
  CHECK(g.angle_deg == doctest::Approx(expected_angle).epsilon(1e-12));
  CHECK(g.angle_deg == doctest::Approx(45.0).epsilon(1e-12));
  CHECK(g.distance == doctest::Approx(expected_distance).epsilon(1e-12));
  CHECK(g.distance == doctest::Approx(14.142135623730951).epsilon(1e-9));
}

TEST_CASE("geometry: mirror symmetry is exact") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ux(25.0, 95.0);
  std::uniform_real_distribution<double> uy(0.5, 42.0);
  for (int i = 0; i < 200; ++i) {
    double x = ux(rng), y = uy(rng);
    auto a = shot_geometry(x, y);
    auto b = shot_geometry(x, -y);
    CHECK(a.distance == b.distance);
    CHECK(a.angle_deg == b.angle_deg);
    CHECK(a.side == ShotSide::Right);
    CHECK(b.side == ShotSide::Left);
  }
}

TEST_CASE("geometry: behind the goal line clamps the angle at 90") {
  auto g = shot_geometry(features::kGoalX + 5.0, 3.0);
  CHECK(g.angle_deg == 90.0);
  CHECK(g.distance == doctest::Approx(std::hypot(5.0, 3.0)));
}

TEST_CASE("rebound: opposite-side 45/45 sweeps 90 degrees exactly") {
  auto [x0, y0] = at(20.0, 45.0, +1.0);
  auto [x1, y1] = at(15.0, 45.0, -1.0);
  auto initial = make_shot("G1", 0, 100, x0, y0, EventKind::ShotOnGoal);
  auto shot = make_shot("G1", 1, 101, x1, y1, EventKind::ShotOnGoal);
  std::vector<ShotEvent> prev = {initial};
  auto info = features::classify_rebound(shot, prev);
  CHECK(info.rebound == 1);
  CHECK(info.angle_change_left + info.angle_change_right == 90.0);
  // Movement from the right side toward the left lands in the left field.
  CHECK(info.angle_change_left == 90.0);
  CHECK(info.angle_change_right == 0.0);
}

TEST_CASE("rebound: a three-second gap does not qualify") {
  auto initial = make_shot("G1", 0, 100, 80, 5, EventKind::ShotOnGoal);
  auto shot = make_shot("G1", 1, 103, 84, 0, EventKind::ShotOnGoal);
  std::vector<ShotEvent> prev = {initial};
  auto info = features::classify_rebound(shot, prev);
  CHECK(info.rebound == 0);
  CHECK(info.angle_change_left == 0.0);
  CHECK(info.angle_change_right == 0.0);
}

TEST_CASE("rebound: same angle and side gives zero sweep") {
  auto [x, y] = at(18.0, 30.0, +1.0);
  auto initial = make_shot("G1", 0, 100, x, y, EventKind::ShotOnGoal);
  auto [x1, y1] = at(12.0, 30.0, +1.0);
  auto shot = make_shot("G1", 1, 101, x1, y1, EventKind::ShotOnGoal);
  std::vector<ShotEvent> prev = {initial};
  auto info = features::classify_rebound(shot, prev);
  CHECK(info.rebound == 1);
  CHECK(info.angle_change_left ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(info.angle_change_right ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rebound: same-side movement is attributed by direction") {
  auto [x0, y0] = at(20.0, 50.0, +1.0);
  auto [x1, y1] = at(10.0, 20.0, +1.0);  // toward center from the right
  auto initial = make_shot("G1", 0, 10, x0, y0, EventKind::ShotOnGoal);
  auto shot = make_shot("G1", 1, 11, x1, y1, EventKind::ShotOnGoal);
  std::vector<ShotEvent> prev = {initial};
  auto info = features::classify_rebound(shot, prev);
  CHECK(info.rebound == 1);
  CHECK(info.angle_change_left == doctest::Approx(30.0).epsilon(1e-9));
  CHECK(info.angle_change_right == 0.0);
}

TEST_CASE("rebound: gating conditions") {
  auto shot = make_shot("G1", 1, 101, 84, 0, EventKind::ShotOnGoal);
  std::vector<ShotEvent> prev;

  SUBCASE("missed shots do not initiate") {
    prev = {make_shot("G1", 0, 100, 80, 5, EventKind::MissedShot)};
    CHECK(features::classify_rebound(shot, prev).rebound == 0);
  }
  SUBCASE("goals do not initiate (play stops)") {
    prev = {make_shot("G1", 0, 100, 80, 5, EventKind::Goal)};
    CHECK(features::classify_rebound(shot, prev).rebound == 0);
  }
  SUBCASE("other team's shot does not initiate") {
    auto other = make_shot("G1", 0, 100, 80, 5, EventKind::ShotOnGoal,
                           ShotType::Wrist, "A1", "AWAY");
    prev = {other};
    CHECK(features::classify_rebound(shot, prev).rebound == 0);
  }
  SUBCASE("an intervening row of any kind breaks the chain") {
    auto initial = make_shot("G1", 0, 100, 80, 5, EventKind::ShotOnGoal);
    ShotEvent other = initial;
    other.event_index = 1;
    other.kind = EventKind::Other;
    other.shooter_id.clear();
    other.x.reset();
    other.y.reset();
    other.shot_type.reset();
    prev = {initial, other};
    CHECK(features::classify_rebound(shot, prev).rebound == 0);
  }
  SUBCASE("period boundary resets eligibility even within two seconds") {
    auto initial = make_shot("G1", 0, 1199, 80, 5, EventKind::ShotOnGoal);
    auto next = make_shot("G1", 1, 1200, 84, 0, EventKind::ShotOnGoal);
    prev = {initial};
    CHECK(features::classify_rebound(next, prev).rebound == 0);
  }
  SUBCASE("25-foot rule applies to the rebound shot") {
    auto initial = make_shot("G1", 0, 100, 80, 5, EventKind::ShotOnGoal);
    auto far = make_shot("G1", 1, 101, features::kGoalX - 26.0, 0,
                         EventKind::ShotOnGoal);
    prev = {initial};
    CHECK(features::classify_rebound(far, prev).rebound == 0);
    auto close = make_shot("G1", 1, 101, features::kGoalX - 24.0, 0,
                           EventKind::ShotOnGoal);
    CHECK(features::classify_rebound(close, prev).rebound == 1);
  }
  SUBCASE("own rebound requires the same shooter") {
    auto initial = make_shot("G1", 0, 100, 80, 5, EventKind::ShotOnGoal,
                             ShotType::Wrist, "H1");
    prev = {initial};
    auto own = make_shot("G1", 1, 101, 84, 0, EventKind::ShotOnGoal,
                         ShotType::Wrist, "H1");
    auto teammate = make_shot("G1", 1, 101, 84, 0, EventKind::ShotOnGoal,
                              ShotType::Wrist, "H2");
    CHECK(features::classify_rebound(own, prev).own_rebound == 1);
    auto mate = features::classify_rebound(teammate, prev);
    CHECK(mate.rebound == 1);
    CHECK(mate.own_rebound == 0);
  }
}

TEST_CASE("rebound flags match an independent pairwise scan") {
  // Oracle: look only at adjacent event pairs.
  synth::SynthConfig config;
  config.seed = 21;
  config.n_games = 6;
  config.rebound_prob = 0.3;
  auto result = synth::generate(config);
  REQUIRE(result.events.size() <= 2000);

  std::vector<const ShotEvent*> game_events;
  std::string game;
  auto check_game = [&]() {
    for (std::size_t i = 0; i < game_events.size(); ++i) {
      const ShotEvent& e = *game_events[i];
      if (!e.is_on_goal() || !e.x || !e.y) continue;
      std::vector<ShotEvent> prev;
      for (std::size_t j = 0; j < i; ++j) prev.push_back(*game_events[j]);
      auto info = features::classify_rebound(e, prev);

      int expected = 0;
      if (i > 0) {
        const ShotEvent& p = *game_events[i - 1];
        if (p.kind == EventKind::ShotOnGoal &&
            p.shooter_team == e.shooter_team && p.period == e.period &&
            e.clock - p.clock <= 2 &&
            shot_geometry(*e.x, *e.y).distance < 25.0) {
          expected = 1;
        }
      }
      CHECK(info.rebound == expected);
    }
  };
  for (const auto& e : result.events) {
    if (e.game_id != game) {
      check_game();
      game_events.clear();
      game = e.game_id;
    }
    game_events.push_back(&e);
  }
  check_game();
}

TEST_CASE("detailed_strength covers the nine situations") {
  using features::detailed_strength;
  CHECK(detailed_strength(5, 5) == Strength::EV55);
  CHECK(detailed_strength(4, 4) == Strength::EV44);
  CHECK(detailed_strength(3, 3) == Strength::EV44);
  CHECK(detailed_strength(5, 4) == Strength::PP54);
  CHECK(detailed_strength(4, 3) == Strength::PP54);
  CHECK(detailed_strength(5, 3) == Strength::PP53);
  CHECK(detailed_strength(4, 5) == Strength::SH45);
  CHECK(detailed_strength(3, 4) == Strength::SH45);
  CHECK(detailed_strength(3, 5) == Strength::SH35);
  CHECK_THROWS_AS(detailed_strength(6, 5), Error);
  CHECK_THROWS_AS(detailed_strength(5, 2), Error);
}

namespace {

OnIceContext five_on_five(Seconds fatigue_shooter) {
  OnIceContext ctx;
  ctx.skaters_for = {{"H1", fatigue_shooter},
                     {"H2", 10},
                     {"H3", 10},
                     {"H4", 15},
                     {"H5", 15}};
  ctx.skaters_against = {
      {"A1", 20}, {"A2", 20}, {"A3", 20}, {"A4", 20}, {"A5", 20}};
  ctx.strength_for = 5;
  ctx.strength_against = 5;
  return ctx;
}

}  // namespace

TEST_CASE("build_features: worked team time-on-ice example") {
  OnIceContext ctx;
  ctx.skaters_for = {{"H1", 10}, {"H2", 10}, {"H3", 10}, {"H4", 15},
                     {"H5", 15}};
  ctx.skaters_against = {
      {"A1", 7}, {"A2", 9}, {"A3", 11}, {"A4", 13}, {"A5", 20}};
  ctx.strength_for = 5;
  ctx.strength_against = 5;
  auto shot = make_shot("G1", 0, 100, 80, 0, EventKind::ShotOnGoal,
                        ShotType::Wrist, "H1");
  auto fv = features::build_features(shot, ctx, {});
  CHECK(fv.off_toi == 12.0);  // (10+10+10+15+15)/5
  CHECK(fv.def_toi == 12.0);
  CHECK(fv.shooter_fatigue == 10.0);
}

TEST_CASE("build_features: interactions") {
  auto shot = make_shot("G1", 0, 100, 80, 0, EventKind::ShotOnGoal,
                        ShotType::Wrist, "H1");
  auto fv = features::build_features(shot, five_on_five(10), {});
  CHECK(fv.rebound == 0);
  CHECK(fv.reb_x_angle == 0.0);
  CHECK(fv.own_x_angle == 0.0);
  CHECK(fv.tip_x_angle == 0.0);

  auto [x, y] = at(15.0, 63.0, +1.0);
  auto tip = make_shot("G1", 0, 100, x, y, EventKind::ShotOnGoal,
                       ShotType::TipIn, "H1");
  auto tip_fv = features::build_features(tip, five_on_five(10), {});
  CHECK(tip_fv.tip_x_angle == doctest::Approx(63.0).epsilon(1e-9));
  CHECK(tip_fv.tip_x_angle == tip_fv.angle);
}

TEST_CASE("build_features: unknown shooter is a data error") {
  auto shot = make_shot("G1", 0, 100, 80, 0, EventKind::ShotOnGoal,
                        ShotType::Wrist, "STRANGER");
  CHECK_THROWS_AS(features::build_features(shot, five_on_five(10), {}), Error);
}

TEST_CASE("build_features: feature-vector invariants hold on synth data") {
  synth::SynthConfig config;
  config.seed = 31;
  config.n_games = 4;
  config.rebound_prob = 0.25;
  auto result = synth::generate(config);
  auto contexts = ingest::join_on_ice(result.events, result.shifts);

  std::size_t start = 0;
  int rebounds = 0;
  for (std::size_t i = 0; i < result.events.size(); ++i) {
    const auto& e = result.events[i];
    if (i > 0 && result.events[i - 1].game_id != e.game_id) start = i;
    if (!e.is_on_goal() || e.zone != ZoneKind::Offensive || !e.goalie_on_ice) {
      continue;
    }
    std::span<const ShotEvent> prev(result.events.data() + start, i - start);
    auto fv = features::build_features(e, contexts.at(event_key(e)), prev);
    CHECK(fv.angle >= 0.0);
    CHECK(fv.angle <= 90.0);
    CHECK(fv.distance >= 0.0);
    if (fv.own_rebound) CHECK(fv.rebound == 1);
    CHECK((fv.angle_change_left == 0.0 || fv.angle_change_right == 0.0));
    if (!fv.rebound) {
      CHECK(fv.angle_change_left == 0.0);
      CHECK(fv.angle_change_right == 0.0);
    }
    CHECK(fv.reb_x_angle == fv.rebound * fv.angle);
    CHECK(fv.own_x_angle == fv.own_rebound * fv.angle);
    rebounds += fv.rebound;
  }
  CHECK(rebounds > 0);  // generator exercised the rebound path
}

TEST_CASE("monotone fatigue: delaying a shot within a shift") {
  auto base = make_shot("G1", 0, 100, 77, 4, EventKind::ShotOnGoal,
                        ShotType::Wrist, "H1");
  auto fv0 = features::build_features(base, five_on_five(10), {});
  for (Seconds delay : {1, 5, 19}) {
    auto later = base;
    later.clock += delay;
    OnIceContext ctx = five_on_five(10 + delay);
    for (auto& s : ctx.skaters_against) s.seconds_on_ice += delay;
    for (auto& s : ctx.skaters_for) {
      if (s.player_id != "H1") s.seconds_on_ice += delay;
    }
    auto fv1 = features::build_features(later, ctx, {});
    CHECK(fv1.shooter_fatigue - fv0.shooter_fatigue ==
          static_cast<double>(delay));
    CHECK(fv1.distance == fv0.distance);
    CHECK(fv1.angle == fv0.angle);
  }
}

TEST_CASE("filter_eligible keeps offensive-zone on-goal shots with a goalie") {
  auto good = make_shot("G1", 0, 10, 80, 0, EventKind::Goal);
  auto empty_net = make_shot("G1", 1, 20, 80, 0, EventKind::ShotOnGoal);
  empty_net.goalie_on_ice = false;
  empty_net.goalie_id.clear();
  auto neutral = make_shot("G1", 2, 30, 10, 0, EventKind::ShotOnGoal);
  neutral.zone = ZoneKind::Neutral;
  auto missed = make_shot("G1", 3, 40, 80, 0, EventKind::MissedShot);

  std::vector<ShotEvent> events = {good, empty_net, neutral, missed};
  auto idx = features::filter_eligible(events);
  CHECK(idx == std::vector<std::size_t>{0});
}

TEST_CASE("feature matrix export: field order, indicators, label last") {
  auto shot = make_shot("G1", 0, 100, 80, 6, EventKind::Goal, ShotType::Slap,
                        "H1");
  auto fv = features::build_features(shot, five_on_five(10), {});
  std::ostringstream out;
  features::write_feature_matrix(out, std::vector<features::FeatureVector>{fv});
  std::istringstream in(out.str());
  std::string version, header, row;
  std::getline(in, version);
  std::getline(in, header);
  std::getline(in, row);
  CHECK(version == features::kFeaturesVersionLine);
  CHECK(header ==
        "distance,angle,rebound,own_rebound,angle_change_left,"
        "angle_change_right,type_backhand,type_slap,type_snap,type_tip_in,"
        "type_wrist,str_ev44,str_pp54,str_pp53,str_sh45,str_sh35,"
        "shooter_fatigue,off_toi,def_toi,score_diff,by_home,reb_x_angle,"
        "own_x_angle,tip_x_angle,label");
  CHECK(std::count(row.begin(), row.end(), ',') == 24);
  CHECK(row.back() == '1');  // goal label
}

TEST_CASE("feature expansion matches the predictor layout") {
  auto shot = make_shot("G1", 0, 100, 80, 6, EventKind::Goal, ShotType::Slap,
                        "H1");
  auto fv = features::build_features(shot, five_on_five(10), {});
  auto x = features::expand(fv, features::predictor_names());
  CHECK(x(0) == 1.0);  // intercept
  CHECK(x.size() ==
        static_cast<Eigen::Index>(features::predictor_names().size()));
  CHECK(features::predictor_value(fv, "type_slap") == 1.0);
  CHECK(features::predictor_value(fv, "type_wrist") == 0.0);
  CHECK(features::predictor_value(fv, "str_ev44") == 0.0);
  CHECK(fv.label == 1);
  CHECK_THROWS_AS(features::predictor_value(fv, "no_such_column"), Error);
}
