#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace puckweight {

using Seconds = std::int64_t;

enum class EventKind { ShotOnGoal, Goal, MissedShot, BlockedShot, Other };
enum class ShotType { WrapAround, Wrist, Slap, Backhand, Snap, TipIn };
enum class ZoneKind { Offensive, Neutral, Defensive };
enum class PlayerPosition { Forward, Defenseman, Goalie };

// Skater-count situations after the grouping rules (reference EV55).
enum class Strength { EV55, EV44, PP54, PP53, SH45, SH35 };

const char* to_token(EventKind k);
const char* to_token(ShotType t);
const char* to_token(ZoneKind z);
const char* to_token(PlayerPosition p);
const char* to_token(Strength s);

std::optional<EventKind> event_kind_from_token(const std::string& tok);
std::optional<ShotType> shot_type_from_token(const std::string& tok);
std::optional<ZoneKind> zone_from_token(const std::string& tok);
std::optional<PlayerPosition> position_from_token(const std::string& tok);
std::optional<Strength> strength_from_token(const std::string& tok);

const std::vector<std::string>& shot_type_tokens();
const std::vector<std::string>& strength_tokens();

// One row of the events file: a shot attempt, goal, or sequencing-only row.
struct ShotEvent {
  std::string game_id;
  std::string season;
  int event_index = 0;  // ordinal within game, strictly increasing
  int period = 1;
  Seconds clock = 0;  // seconds elapsed from game start, periods flattened
  EventKind kind = EventKind::ShotOnGoal;
  std::string shooter_id;  // may be empty for kind=other
  std::string shooter_team;
  std::string home_team;
  std::optional<double> x;  // feet, rink frame; required for on-goal kinds
  std::optional<double> y;
  std::optional<ShotType> shot_type;  // required for on-goal kinds
  int score_for = 0;                  // shooting team's goals before this event
  int score_against = 0;
  ZoneKind zone = ZoneKind::Offensive;  // relative to the row's team
  bool goalie_on_ice = true;
  std::string goalie_id;  // defending goalie; empty when net is empty

  bool is_shot_class() const { return kind != EventKind::Other; }
  // Goals count as shots on goal everywhere shots are tallied.
  bool is_on_goal() const {
    return kind == EventKind::ShotOnGoal || kind == EventKind::Goal;
  }

  bool operator==(const ShotEvent&) const = default;
};

struct ShiftRecord {
  std::string game_id;
  std::string player_id;
  std::string team;
  PlayerPosition position = PlayerPosition::Forward;
  Seconds start_seconds = 0;
  Seconds end_seconds = 0;  // half-open interval [start, end)

  bool operator==(const ShiftRecord&) const = default;
};

struct SkaterOnIce {
  std::string player_id;
  Seconds seconds_on_ice = 0;  // shot time minus shift start

  bool operator==(const SkaterOnIce&) const = default;
};

// Who was on the ice for one shot, from the shooting team's perspective.
struct OnIceContext {
  int shot_event_index = 0;
  std::vector<SkaterOnIce> skaters_for;      // sorted by player id
  std::vector<SkaterOnIce> skaters_against;  // sorted by player id
  int strength_for = 0;   // skater counts, goalies excluded
  int strength_against = 0;
};

// (game_id, event_index) uniquely identifies an event across a dataset.
using EventKey = std::pair<std::string, int>;

inline EventKey event_key(const ShotEvent& e) {
  return {e.game_id, e.event_index};
}

}  // namespace puckweight
