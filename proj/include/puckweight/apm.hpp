#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "puckweight/pipeline.hpp"
#include "puckweight/stats.hpp"
#include "puckweight/tables.hpp"

namespace puckweight::apm {

enum class OutcomeKind { Goals, Wshots, Shots, Fenwick, Corsi };
const char* outcome_letter(OutcomeKind o);  // G W S F C
const char* outcome_name(OutcomeKind o);
std::optional<OutcomeKind> outcome_from_name(const std::string& name);

// Situation from one team's perspective.
enum class Situation { EV, PP, SH };
const char* situation_name(Situation s);

enum class ObsSituation { EV, PPHome, PPAway };

struct Outcomes {
  std::int64_t goals = 0, shots = 0, fenwick = 0, corsi = 0;
  double wshots = 0.0;

  double get(OutcomeKind o) const;
};

// A substitution-free stretch of game clock with its on-ice sets and the
// outcome tallies for both teams.
struct ApmObservation {
  std::string game_id;
  Seconds start = 0;
  Seconds end = 0;
  std::vector<std::string> home_skaters;
  std::vector<std::string> away_skaters;
  ZoneKind zone_start_home = ZoneKind::Neutral;  // home perspective
  ObsSituation situation = ObsSituation::EV;
  Outcomes home;
  Outcomes away;

  Seconds duration() const { return end - start; }
  Situation situation_for(bool home_side) const;
};

// Observation boundaries fall at every shift start/end and period boundary,
// partitioning each game's clock exactly. The zone label comes from the
// event row at the observation's start when there is one, otherwise it
// carries over from the previous observation.
std::vector<ApmObservation> build_observations(const ScoredDataset& scored);

struct DesignOptions {
  OutcomeKind outcome = OutcomeKind::Goals;
  bool zone_indicators = true;
  // Keep only rows whose offense team is in this situation.
  std::optional<Situation> offense_situation;
  // Declared player universe; members with no observations are dropped
  // with a warning. Defaults to the players seen in the observations.
  std::vector<std::string> roster;
};

struct ApmDesign {
  Eigen::SparseMatrix<double> X;
  Eigen::VectorXd y;  // outcome per 60 minutes
  Eigen::VectorXd w;  // row weight = observation duration in seconds
  std::vector<std::string> col_names;
  std::vector<bool> penalized;  // player effects only
  std::vector<std::string> players;
  std::vector<std::string> row_game;
  std::vector<std::string> warnings;
  std::size_t offense_start = 0;  // first offense-player column
  std::size_t defense_start = 0;
};

// Two rows per observation (home offense / away offense): +1 indicators for
// the offense players, a separate defensive indicator block, optional zone
// start indicators (reference: neutral), and an intercept.
ApmDesign build_design(std::span<const ApmObservation> observations,
                       const DesignOptions& options);

// Minimizes sum_i w_i (y_i - x_i' b)^2 + lambda * |b_pen|^2 where the
// penalty covers only columns flagged in `penalized`. lambda may be zero
// only for full-rank designs.
Eigen::VectorXd ridge_solve(const Eigen::SparseMatrix<double>& X,
                            const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                            const std::vector<bool>& penalized, double lambda);

struct ApmOptions {
  double lambda = 50.0;
  bool zone_indicators = true;
  std::vector<OutcomeKind> outcomes = {OutcomeKind::Goals, OutcomeKind::Wshots,
                                       OutcomeKind::Shots, OutcomeKind::Fenwick,
                                       OutcomeKind::Corsi};
};

struct PlayerApm {
  std::string player_id;
  PlayerPosition position = PlayerPosition::Forward;
  std::string team;
  // Per-60 rates by (player-perspective situation, outcome).
  std::map<Situation, std::map<OutcomeKind, double>> off;
  std::map<Situation, std::map<OutcomeKind, double>> def;
  std::map<Situation, Seconds> toi;
  // Rate x exposure, summed over situations.
  std::map<OutcomeKind, double> total_off;
  std::map<OutcomeKind, double> total_def;
};

struct FitInfo {
  Situation offense_situation = Situation::EV;
  OutcomeKind outcome = OutcomeKind::Goals;
  double intercept = 0.0;
  double zone_offensive = 0.0;
  double zone_defensive = 0.0;
  std::int64_t rows = 0;
};

struct ApmResult {
  double lambda = 0.0;
  bool zone_indicators = true;
  std::vector<OutcomeKind> outcomes;
  std::map<std::string, PlayerApm> players;
  std::vector<FitInfo> fits;
};

// One ridge fit per offense situation and outcome. A fit with offense in
// situation s also yields defensive effects for the opposing players, whose
// own situation is the mirror of s (PP defense comes from the SH-offense
// fit and vice versa).
ApmResult fit_apm(std::span<const ApmObservation> observations,
                  const Dataset& data, const ApmOptions& options);

enum class ApmSide { Offense, Defense };
Table apm_table(const ApmResult& result, ApmSide side);

struct WowyScope {
  std::set<Situation> situations = {Situation::EV, Situation::PP,
                                    Situation::SH};
  stats::Venue venue = stats::Venue::All;
};

struct WowyResult {
  double on_rate = 0.0;   // per 60
  double off_rate = 0.0;  // per 60
  double diff = 0.0;
  Seconds on_seconds = 0;
  Seconds off_seconds = 0;
};

// Team outcome rate with the player on the ice vs off it, over the games
// his team played. Errors if either side has zero time.
WowyResult wowy(std::span<const ApmObservation> observations,
                const Dataset& data, const std::string& player,
                OutcomeKind outcome, const WowyScope& scope = {});

// k-fold cross-validation by game over a lambda grid; returns the grid
// value with the smallest held-out weighted squared error.
double cross_validate_lambda(std::span<const ApmObservation> observations,
                             const DesignOptions& options,
                             std::span<const double> grid, int folds);

inline constexpr const char* kDesignVersionLine = "#puckweight-design v1";

// Coordinate text dump of a design for external verification.
void write_design(std::ostream& out, const ApmDesign& design);

}  // namespace puckweight::apm
