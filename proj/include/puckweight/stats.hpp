#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "puckweight/pipeline.hpp"
#include "puckweight/tables.hpp"
#include "puckweight/types.hpp"

namespace puckweight::stats {

enum class Venue { All, AwayOnly };

struct StatScope {
  std::set<Strength> strengths = {Strength::EV55};
  Venue venue = Venue::All;
  std::int64_t min_shots = 0;  // drop lines below this many shots
};

// One offensive-zone attempt with the goalie on the ice, attributed to a
// shooter and a defending side. On-goal attempts carry the model score.
struct Attempt {
  const ShotEvent* event = nullptr;
  Strength strength = Strength::EV55;
  std::string defending_team;
  bool shooter_is_home = false;
  bool on_goal = false;  // shot-on-goal or goal; else missed/blocked
  double p_hat = 0.0;
  double variance = 0.0;  // squared delta-method standard error
};

std::vector<Attempt> collect_attempts(const ScoredDataset& scored);

struct SkaterStatLine {
  std::string player_id;
  PlayerPosition position = PlayerPosition::Forward;
  std::string team;
  double eg = 0.0;  // expected goals = weighted shots
  std::int64_t g = 0;
  double diff_g = 0.0;
  double g_err = 0.0;
  std::int64_t shots = 0;
  double sh_pct = 0.0;
  double exp_sh_pct = 0.0;
  double adj_sh_pct = 0.0;
  double s_err = 0.0;
  std::int64_t missed = 0;
  std::int64_t blocked = 0;
  Seconds toi_seconds = 0;
  double g60 = 0.0, shots60 = 0.0, fenwick60 = 0.0, corsi60 = 0.0,
         wshots60 = 0.0;
};

struct GoalieStatLine {
  std::string goalie_id;
  std::string team;
  double exp_ga = 0.0;
  std::int64_t ga = 0;
  double diff_ga = 0.0;  // goals prevented
  double g_err = 0.0;
  std::int64_t shot_a = 0;
  double sv_pct = 0.0;
  double exp_sv_pct = 0.0;
  double adj_sv_pct = 0.0;
  double err = 0.0;
  double change = 0.0;  // adj_sv_pct - sv_pct
};

enum class TeamSide { For, Against };

struct TeamStatLine {
  std::string team;
  TeamSide side = TeamSide::For;
  Seconds situation_seconds = 0;
  std::int64_t goals = 0, shots = 0, missed = 0, blocked = 0;
  double eg = 0.0;
  double diff = 0.0;  // for: g - eg; against: eg - ga
  double err = 0.0;
  double goals60 = 0.0, shots60 = 0.0, fenwick60 = 0.0, corsi60 = 0.0,
         wshots60 = 0.0;
  double pct = 0.0, exp_pct = 0.0, adj_pct = 0.0;  // sh% / sv% by side
};

// League percentages over the scored shots in scope. The save flavor uses
// the defending side's venue, the shooting flavor the shooter's.
double league_shooting_pct(const ScoredDataset& scored, const StatScope& scope);
double league_save_pct(const ScoredDataset& scored, const StatScope& scope);

// Sorted descending by DiffG, ties by player id. Shooters with zero shots
// in scope are omitted.
std::vector<SkaterStatLine> skater_stats(const ScoredDataset& scored,
                                         const StatScope& scope,
                                         double league_sh_pct);
std::vector<GoalieStatLine> goalie_stats(const ScoredDataset& scored,
                                         const StatScope& scope,
                                         double league_sv_pct);
std::vector<TeamStatLine> team_stats(const ScoredDataset& scored,
                                     const StatScope& scope,
                                     TeamSide side);

// Rule of thumb: six goals buy one win.
inline double goals_to_wins(double goal_delta) { return goal_delta / 6.0; }

// Seconds each skater spent on ice in scope situations (venue-filtered).
std::map<std::string, Seconds> skater_scope_toi(const ScoredDataset& scored,
                                                const StatScope& scope);

Table skaters_table(const std::vector<SkaterStatLine>& lines);
Table goalies_table(const std::vector<GoalieStatLine>& lines);
Table teams_table(const std::vector<TeamStatLine>& lines);

}  // namespace puckweight::stats
