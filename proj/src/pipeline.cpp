#include "puckweight/pipeline.hpp"

#include <algorithm>
#include <unordered_map>

#include "puckweight/errors.hpp"
#include "puckweight/ingest.hpp"

namespace puckweight {

const GameInfo& Dataset::game(const std::string& id) const {
  auto it = games.find(id);
  if (it == games.end()) {
    throw Error(ErrorCategory::Data, "unknown game: " + id);
  }
  return it->second;
}

Dataset build_dataset(std::vector<ShotEvent> events,
                      std::vector<ShiftRecord> shifts) {
  Dataset ds;
  ds.events = std::move(events);
  ds.shifts = std::move(shifts);

  // Game roster/metadata from both files; events are authoritative for the
  // home team, shifts for the opponent and the clock extent.
  for (const auto& e : ds.events) {
    auto [it, inserted] = ds.games.try_emplace(e.game_id);
    GameInfo& g = it->second;
    if (inserted) {
      g.game_id = e.game_id;
      g.season = e.season;
      g.home_team = e.home_team;
    } else {
      if (g.home_team != e.home_team) {
        throw Error(ErrorCategory::Data,
                    "inconsistent home team in game " + e.game_id);
      }
      if (g.season != e.season) {
        throw Error(ErrorCategory::Data,
                    "inconsistent season in game " + e.game_id);
      }
    }
  }

  std::map<std::string, std::vector<const ShiftRecord*>> shifts_by_game;
  for (const auto& s : ds.shifts) {
    shifts_by_game[s.game_id].push_back(&s);
  }
  for (auto& [gid, game_shifts] : shifts_by_game) {
    auto it = ds.games.find(gid);
    if (it == ds.games.end()) continue;  // shifts for a game with no events
    GameInfo& g = it->second;
    std::vector<std::string> teams;
    for (const ShiftRecord* s : game_shifts) {
      g.end = std::max(g.end, s->end_seconds);
      if (std::find(teams.begin(), teams.end(), s->team) == teams.end()) {
        teams.push_back(s->team);
      }
    }
    if (teams.size() != 2) {
      throw Error(ErrorCategory::Data,
                  "game " + gid + " has " + std::to_string(teams.size()) +
                      " teams in shift data, expected 2");
    }
    if (std::find(teams.begin(), teams.end(), g.home_team) == teams.end()) {
      throw Error(ErrorCategory::Data,
                  "home team " + g.home_team + " has no shifts in game " + gid);
    }
    g.away_team = teams[0] == g.home_team ? teams[1] : teams[0];

    std::vector<ShiftRecord> owned;
    owned.reserve(game_shifts.size());
    for (const ShiftRecord* s : game_shifts) owned.push_back(*s);
    g.intervals = build_intervals(owned, g.home_team);
  }

  // Per-season ordinals by game id; ids sort lexicographically.
  {
    std::map<std::string, std::vector<GameInfo*>> by_season;
    for (auto& [gid, g] : ds.games) by_season[g.season].push_back(&g);
    for (auto& [season, games] : by_season) {
      std::sort(games.begin(), games.end(),
                [](const GameInfo* a, const GameInfo* b) {
                  return a->game_id < b->game_id;
                });
      int ord = 0;
      for (GameInfo* g : games) g->ordinal = ++ord;
    }
  }

  // Player position and most frequent team.
  {
    std::map<std::string, std::map<std::string, int>> team_counts;
    std::map<std::string, PlayerPosition> positions;
    for (const auto& s : ds.shifts) {
      team_counts[s.player_id][s.team] += 1;
      positions[s.player_id] = s.position;
    }
    for (const auto& [pid, counts] : team_counts) {
      PlayerInfo info;
      info.position = positions[pid];
      int best = -1;
      for (const auto& [team, cnt] : counts) {
        if (cnt > best) {
          best = cnt;
          info.team = team;
        }
      }
      ds.players[pid] = info;
    }
  }

  ds.contexts = ingest::join_on_ice(ds.events, ds.shifts);

  // Feature rows for the model-eligible shots, in event order. Rebound
  // classification walks the per-game event sequence, so each game's rows
  // must be contiguous in the file.
  std::unordered_map<std::string, std::size_t> game_start;
  for (std::size_t i = 0; i < ds.events.size(); ++i) {
    const std::string& gid = ds.events[i].game_id;
    auto [it, inserted] = game_start.try_emplace(gid, i);
    if (!inserted && ds.events[i - 1].game_id != gid) {
      throw Error(ErrorCategory::Data,
                  "events of game " + gid + " are not contiguous");
    }
  }
  auto eligible_idx = features::filter_eligible(ds.events);
  ds.eligible.reserve(eligible_idx.size());
  for (std::size_t idx : eligible_idx) {
    const ShotEvent& e = ds.events[idx];
    auto ctx_it = ds.contexts.find(event_key(e));
    if (ctx_it == ds.contexts.end()) {
      throw Error(ErrorCategory::Data,
                  "missing on-ice context for game " + e.game_id + " event " +
                      std::to_string(e.event_index));
    }
    std::size_t start = game_start.at(e.game_id);
    std::span<const ShotEvent> prev(ds.events.data() + start, idx - start);
    ds.eligible.push_back({idx, features::build_features(e, ctx_it->second, prev)});
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& events_path,
                     const std::filesystem::path& shifts_path) {
  return build_dataset(ingest::parse_events_file(events_path),
                       ingest::parse_shifts_file(shifts_path));
}

const glm::Prediction* ScoredDataset::prediction_for(
    const EventKey& key) const {
  auto it = scored_index.find(key);
  if (it == scored_index.end()) return nullptr;
  return &predictions[it->second];
}

ScoredDataset score_dataset(Dataset data, glm::FittedModel model) {
  ScoredDataset scored;
  scored.predictions.reserve(data.eligible.size());
  for (std::size_t i = 0; i < data.eligible.size(); ++i) {
    const auto& shot = data.eligible[i];
    scored.predictions.push_back(glm::predict(model, shot.fv));
    scored.scored_index[event_key(data.events[shot.event_idx])] = i;
  }
  scored.data = std::move(data);
  scored.model = std::move(model);
  return scored;
}

glm::FittedModel fit_on_dataset(const Dataset& data,
                                const glm::IrlsOptions& options) {
  std::vector<features::FeatureVector> rows;
  rows.reserve(data.eligible.size());
  for (const auto& s : data.eligible) rows.push_back(s.fv);
  return glm::fit_irls(features::design_matrix(rows),
                       features::label_vector(rows),
                       features::predictor_names(), options);
}

}  // namespace puckweight
