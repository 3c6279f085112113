#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "puckweight/types.hpp"

namespace puckweight::features {

// Rink frame: origin at center ice, x toward the attacking goal, standard
// 200x85 ft rink. The goal line sits 11 ft from the end boards, so the
// goal-mouth center is at (89, 0).
inline constexpr double kGoalX = 89.0;

enum class ShotSide { Left, Right, Center };

struct GoalGeometry {
  double distance = 0.0;   // feet from the goal-mouth center
  double angle_deg = 0.0;  // in [0, 90], 0 = straight on
  ShotSide side = ShotSide::Center;
};

// Distance and folded angle of a shot location. Shots from behind the goal
// line keep their true distance but have the angle clamped at 90.
GoalGeometry shot_geometry(double x, double y);

// Signed angle: positive on the Right side, negative on the Left.
double signed_angle(const GoalGeometry& g);

struct ReboundInfo {
  int rebound = 0;
  int own_rebound = 0;
  double angle_change_left = 0.0;   // degrees of goalie travel right-to-left
  double angle_change_right = 0.0;  // degrees of goalie travel left-to-right
};

// A shot is a rebound iff the immediately preceding event of the game is a
// shot on goal by the same team in the same period, at most 2 seconds
// earlier, and this shot is taken from under 25 feet. Any other row between
// the two shots (including kind=other) breaks the chain, as does a goal:
// play stops, so a goal cannot initiate a rebound.
ReboundInfo classify_rebound(const ShotEvent& shot,
                             std::span<const ShotEvent> prev_events);

// Maps raw skater counts (each in 3..5, shooting team first) onto the
// grouped situation categories. 3-on-3 folds into EV44; 4-on-3 into PP54;
// 3-on-4 into SH45.
Strength detailed_strength(int strength_for, int strength_against);

// The fully derived predictor row for one eligible shot.
struct FeatureVector {
  double distance = 0.0;
  double angle = 0.0;
  int rebound = 0;
  int own_rebound = 0;
  double angle_change_left = 0.0;
  double angle_change_right = 0.0;
  ShotType shot_type = ShotType::WrapAround;  // reference category
  Strength strength = Strength::EV55;         // reference category
  double shooter_fatigue = 0.0;               // seconds into current shift
  double off_toi = 0.0;  // mean seconds on ice, shooting team
  double def_toi = 0.0;  // mean seconds on ice, defending team
  double score_diff = 0.0;
  int by_home = 0;
  double reb_x_angle = 0.0;
  double own_x_angle = 0.0;
  double tip_x_angle = 0.0;
  int label = 0;  // 1 = goal
};

FeatureVector build_features(const ShotEvent& shot, const OnIceContext& ctx,
                             std::span<const ShotEvent> prev_events);

// Indices of events eligible for the model: on-goal kinds, taken from the
// offensive zone, with the goalie on the ice. Missed and blocked shots are
// excluded here but still count toward Fenwick/Corsi downstream.
std::vector<std::size_t> filter_eligible(std::span<const ShotEvent> events);

// Canonical predictor layout for the fitted model: intercept first, then
// numeric fields, indicator columns for the non-reference shot types and
// strengths, and the three angle interactions.
const std::vector<std::string>& predictor_names();

// Value of one named predictor for a feature vector; "(Intercept)" is 1.
// Unknown names raise.
double predictor_value(const FeatureVector& fv, const std::string& name);

Eigen::VectorXd expand(const FeatureVector& fv,
                       const std::vector<std::string>& names);

// Dense design matrix over the canonical predictors, one row per shot.
Eigen::MatrixXd design_matrix(std::span<const FeatureVector> rows);
Eigen::VectorXd label_vector(std::span<const FeatureVector> rows);

// Delimited export, one row per shot: columns in FeatureVector field order
// with categories expanded to indicators (reference categories omitted) and
// the label last.
void write_feature_matrix(std::ostream& out,
                          std::span<const FeatureVector> rows);

inline constexpr const char* kFeaturesVersionLine = "#puckweight-features v1";

}  // namespace puckweight::features
