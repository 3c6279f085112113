#include "puckweight/timeline.hpp"

#include <algorithm>

#include "puckweight/errors.hpp"

namespace puckweight {

std::vector<OnIceInterval> build_intervals(
    std::span<const ShiftRecord> game_shifts, const std::string& home_team,
    Seconds period_seconds) {
  if (game_shifts.empty()) return {};

  Seconds game_end = 0;
  std::vector<Seconds> cuts;
  cuts.push_back(0);
  for (const auto& s : game_shifts) {
    cuts.push_back(s.start_seconds);
    cuts.push_back(s.end_seconds);
    game_end = std::max(game_end, s.end_seconds);
  }
  for (Seconds t = period_seconds; t < game_end; t += period_seconds) {
    cuts.push_back(t);
  }
  cuts.push_back(game_end);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<OnIceInterval> intervals;
  intervals.reserve(cuts.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    OnIceInterval iv;
    iv.start = cuts[i];
    iv.end = cuts[i + 1];
    intervals.push_back(std::move(iv));
  }

  // Boundaries include every shift endpoint, so membership is constant
  // within an interval; scatter each shift into the intervals it covers.
  auto first_at_or_after = [&](Seconds t) {
    return static_cast<std::size_t>(
        std::lower_bound(cuts.begin(), cuts.end(), t) - cuts.begin());
  };
  for (const auto& s : game_shifts) {
    std::size_t lo = first_at_or_after(s.start_seconds);
    std::size_t hi = first_at_or_after(s.end_seconds);
    for (std::size_t i = lo; i < hi && i < intervals.size(); ++i) {
      bool home = s.team == home_team;
      if (s.position == PlayerPosition::Goalie) {
        (home ? intervals[i].home_goalie : intervals[i].away_goalie) = true;
      } else if (home) {
        intervals[i].home_skaters.push_back(s.player_id);
      } else {
        intervals[i].away_skaters.push_back(s.player_id);
      }
    }
  }
  for (auto& iv : intervals) {
    std::sort(iv.home_skaters.begin(), iv.home_skaters.end());
    std::sort(iv.away_skaters.begin(), iv.away_skaters.end());
  }
  return intervals;
}

}  // namespace puckweight
