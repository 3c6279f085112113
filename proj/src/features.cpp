#include "puckweight/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <unordered_map>

#include "puckweight/errors.hpp"

namespace puckweight::features {

namespace {

constexpr double kRadToDeg = 57.295779513082323;  // 180/pi
constexpr double kSideTieTolerance = 1e-9;
constexpr Seconds kReboundWindowSeconds = 2;
constexpr double kReboundMaxDistance = 25.0;

}  // namespace

GoalGeometry shot_geometry(double x, double y) {
  GoalGeometry g;
  double dx = kGoalX - x;
  g.distance = std::hypot(dx, y);
  double a = std::atan2(std::abs(y), dx) * kRadToDeg;
  g.angle_deg = std::min(a, 90.0);  // behind the goal line clamps to 90
  if (std::abs(y) < kSideTieTolerance) {
    g.side = ShotSide::Center;
  } else {
    // From the goalie's perspective, facing up-ice: positive y is his right.
    g.side = y > 0 ? ShotSide::Right : ShotSide::Left;
  }
  return g;
}

double signed_angle(const GoalGeometry& g) {
  switch (g.side) {
    case ShotSide::Right: return g.angle_deg;
    case ShotSide::Left: return -g.angle_deg;
    case ShotSide::Center: return 0.0;
  }
  return 0.0;
}

ReboundInfo classify_rebound(const ShotEvent& shot,
                             std::span<const ShotEvent> prev_events) {
  ReboundInfo info;
  if (prev_events.empty()) return info;
  const ShotEvent& prev = prev_events.back();
  if (prev.kind != EventKind::ShotOnGoal) return info;
  if (prev.shooter_team != shot.shooter_team) return info;
  if (prev.period != shot.period) return info;
  if (shot.clock - prev.clock > kReboundWindowSeconds) return info;
  if (!shot.x || !shot.y || !prev.x || !prev.y) return info;

  GoalGeometry cur = shot_geometry(*shot.x, *shot.y);
  if (!(cur.distance < kReboundMaxDistance)) return info;

  info.rebound = 1;
  info.own_rebound = prev.shooter_id == shot.shooter_id ? 1 : 0;

  // Goalie travel between the two shots: the angle sum when the shots are on
  // opposite sides, the absolute difference on the same side, attributed to
  // the direction of movement.
  GoalGeometry initial = shot_geometry(*prev.x, *prev.y);
  double sweep = signed_angle(cur) - signed_angle(initial);
  if (sweep > 0) {
    info.angle_change_right = sweep;
  } else if (sweep < 0) {
    info.angle_change_left = -sweep;
  }
  return info;
}

Strength detailed_strength(int strength_for, int strength_against) {
  if (strength_for < 3 || strength_for > 5 || strength_against < 3 ||
      strength_against > 5) {
    throw Error(ErrorCategory::Data,
                "unsupported skater counts " + std::to_string(strength_for) +
                    "v" + std::to_string(strength_against));
  }
  int diff = strength_for - strength_against;
  if (diff == 0) return strength_for == 5 ? Strength::EV55 : Strength::EV44;
  if (diff == 1) return Strength::PP54;
  if (diff == 2) return Strength::PP53;
  if (diff == -1) return Strength::SH45;
  return Strength::SH35;  // diff == -2
}

FeatureVector build_features(const ShotEvent& shot, const OnIceContext& ctx,
                             std::span<const ShotEvent> prev_events) {
  if (!shot.x || !shot.y) {
    throw Error(ErrorCategory::Data,
                "shot without coordinates in game " + shot.game_id +
                    " event " + std::to_string(shot.event_index));
  }
  FeatureVector fv;
  GoalGeometry g = shot_geometry(*shot.x, *shot.y);
  fv.distance = g.distance;
  fv.angle = g.angle_deg;

  ReboundInfo reb = classify_rebound(shot, prev_events);
  fv.rebound = reb.rebound;
  fv.own_rebound = reb.own_rebound;
  fv.angle_change_left = reb.angle_change_left;
  fv.angle_change_right = reb.angle_change_right;

  if (!shot.shot_type) {
    throw Error(ErrorCategory::Data,
                "shot without type in game " + shot.game_id + " event " +
                    std::to_string(shot.event_index));
  }
  fv.shot_type = *shot.shot_type;
  fv.strength = detailed_strength(ctx.strength_for, ctx.strength_against);

  const SkaterOnIce* shooter = nullptr;
  double off_sum = 0.0;
  for (const auto& s : ctx.skaters_for) {
    off_sum += static_cast<double>(s.seconds_on_ice);
    if (s.player_id == shot.shooter_id) shooter = &s;
  }
  if (!shooter) {
    throw Error(ErrorCategory::Data,
                "shooter " + shot.shooter_id + " not on ice in game " +
                    shot.game_id + " event " +
                    std::to_string(shot.event_index));
  }
  fv.shooter_fatigue = static_cast<double>(shooter->seconds_on_ice);
  fv.off_toi = off_sum / static_cast<double>(ctx.skaters_for.size());
  double def_sum = 0.0;
  for (const auto& s : ctx.skaters_against) {
    def_sum += static_cast<double>(s.seconds_on_ice);
  }
  fv.def_toi = def_sum / static_cast<double>(ctx.skaters_against.size());

  fv.score_diff = static_cast<double>(shot.score_for - shot.score_against);
  fv.by_home = shot.shooter_team == shot.home_team ? 1 : 0;

  fv.reb_x_angle = fv.rebound * fv.angle;
  fv.own_x_angle = fv.own_rebound * fv.angle;
  fv.tip_x_angle = fv.shot_type == ShotType::TipIn ? fv.angle : 0.0;

  fv.label = shot.kind == EventKind::Goal ? 1 : 0;
  return fv;
}

std::vector<std::size_t> filter_eligible(std::span<const ShotEvent> events) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (e.is_on_goal() && e.zone == ZoneKind::Offensive && e.goalie_on_ice) {
      out.push_back(i);
    }
  }
  return out;
}

const std::vector<std::string>& predictor_names() {
  static const std::vector<std::string> names = {
      "(Intercept)",
      "distance",
      "angle",
      "rebound",
      "own_rebound",
      "angle_change_left",
      "angle_change_right",
      "type_backhand",
      "type_slap",
      "type_snap",
      "type_tip_in",
      "type_wrist",
      "str_ev44",
      "str_pp54",
      "str_pp53",
      "str_sh45",
      "str_sh35",
      "shooter_fatigue",
      "off_toi",
      "def_toi",
      "score_diff",
      "by_home",
      "reb_x_angle",
      "own_x_angle",
      "tip_x_angle",
  };
  return names;
}

double predictor_value(const FeatureVector& fv, const std::string& name) {
  using Getter = double (*)(const FeatureVector&);
  static const std::unordered_map<std::string, Getter> getters = {
      {"(Intercept)", [](const FeatureVector&) { return 1.0; }},
      {"distance", [](const FeatureVector& f) { return f.distance; }},
      {"angle", [](const FeatureVector& f) { return f.angle; }},
      {"rebound",
       [](const FeatureVector& f) { return static_cast<double>(f.rebound); }},
      {"own_rebound",
       [](const FeatureVector& f) {
         return static_cast<double>(f.own_rebound);
       }},
      {"angle_change_left",
       [](const FeatureVector& f) { return f.angle_change_left; }},
      {"angle_change_right",
       [](const FeatureVector& f) { return f.angle_change_right; }},
      {"type_backhand",
       [](const FeatureVector& f) {
         return f.shot_type == ShotType::Backhand ? 1.0 : 0.0;
       }},
      {"type_slap",
       [](const FeatureVector& f) {
         return f.shot_type == ShotType::Slap ? 1.0 : 0.0;
       }},
      {"type_snap",
       [](const FeatureVector& f) {
         return f.shot_type == ShotType::Snap ? 1.0 : 0.0;
       }},
      {"type_tip_in",
       [](const FeatureVector& f) {
         return f.shot_type == ShotType::TipIn ? 1.0 : 0.0;
       }},
      {"type_wrist",
       [](const FeatureVector& f) {
         return f.shot_type == ShotType::Wrist ? 1.0 : 0.0;
       }},
      {"str_ev44",
       [](const FeatureVector& f) {
         return f.strength == Strength::EV44 ? 1.0 : 0.0;
       }},
      {"str_pp54",
       [](const FeatureVector& f) {
         return f.strength == Strength::PP54 ? 1.0 : 0.0;
       }},
      {"str_pp53",
       [](const FeatureVector& f) {
         return f.strength == Strength::PP53 ? 1.0 : 0.0;
       }},
      {"str_sh45",
       [](const FeatureVector& f) {
         return f.strength == Strength::SH45 ? 1.0 : 0.0;
       }},
      {"str_sh35",
       [](const FeatureVector& f) {
         return f.strength == Strength::SH35 ? 1.0 : 0.0;
       }},
      {"shooter_fatigue",
       [](const FeatureVector& f) { return f.shooter_fatigue; }},
      {"off_toi", [](const FeatureVector& f) { return f.off_toi; }},
      {"def_toi", [](const FeatureVector& f) { return f.def_toi; }},
      {"score_diff", [](const FeatureVector& f) { return f.score_diff; }},
      {"by_home",
       [](const FeatureVector& f) { return static_cast<double>(f.by_home); }},
      {"reb_x_angle", [](const FeatureVector& f) { return f.reb_x_angle; }},
      {"own_x_angle", [](const FeatureVector& f) { return f.own_x_angle; }},
      {"tip_x_angle", [](const FeatureVector& f) { return f.tip_x_angle; }},
  };
  auto it = getters.find(name);
  if (it == getters.end()) {
    throw Error(ErrorCategory::Data, "unknown predictor: " + name);
  }
  return it->second(fv);
}

Eigen::VectorXd expand(const FeatureVector& fv,
                       const std::vector<std::string>& names) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < names.size(); ++i) {
    x(static_cast<Eigen::Index>(i)) = predictor_value(fv, names[i]);
  }
  return x;
}

Eigen::MatrixXd design_matrix(std::span<const FeatureVector> rows) {
  const auto& names = predictor_names();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          predictor_value(rows[i], names[j]);
    }
  }
  return X;
}

Eigen::VectorXd label_vector(std::span<const FeatureVector> rows) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = rows[i].label;
  }
  return y;
}

void write_feature_matrix(std::ostream& out,
                          std::span<const FeatureVector> rows) {
  const auto& names = predictor_names();
  out << kFeaturesVersionLine << '\n';
  // Skip the intercept; emit the label last.
  for (std::size_t j = 1; j < names.size(); ++j) {
    out << names[j] << ',';
  }
  out << "label\n";
  char buf[32];
  for (const auto& fv : rows) {
    for (std::size_t j = 1; j < names.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", predictor_value(fv, names[j]));
      out << buf << ',';
    }
    out << fv.label << '\n';
  }
}

}  // namespace puckweight::features
