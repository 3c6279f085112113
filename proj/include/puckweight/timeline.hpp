#pragma once

#include <span>
#include <string>
#include <vector>

#include "puckweight/types.hpp"

namespace puckweight {

// One maximal span of game clock with no substitution on either team.
struct OnIceInterval {
  Seconds start = 0;
  Seconds end = 0;  // half-open [start, end)
  std::vector<std::string> home_skaters;  // sorted by id, goalies excluded
  std::vector<std::string> away_skaters;
  bool home_goalie = false;
  bool away_goalie = false;

  Seconds duration() const { return end - start; }
};

inline constexpr Seconds kPeriodSeconds = 1200;

// Cuts a game's clock at every shift start/end and period boundary and
// labels each piece with the on-ice players. The intervals partition
// [0, max shift end) exactly.
std::vector<OnIceInterval> build_intervals(
    std::span<const ShiftRecord> game_shifts, const std::string& home_team,
    Seconds period_seconds = kPeriodSeconds);

}  // namespace puckweight
