#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "puckweight/features.hpp"
#include "puckweight/glm.hpp"
#include "puckweight/timeline.hpp"
#include "puckweight/types.hpp"

namespace puckweight {

struct GameInfo {
  std::string game_id;
  std::string season;
  std::string home_team;
  std::string away_team;
  Seconds end = 0;
  int ordinal = 0;  // 1-based, by game id within the season
  std::vector<OnIceInterval> intervals;
};

struct PlayerInfo {
  PlayerPosition position = PlayerPosition::Forward;
  std::string team;  // most frequent team over the dataset
};

struct EligibleShot {
  std::size_t event_idx = 0;  // into Dataset::events
  features::FeatureVector fv;
};

// Parsed, validated, joined inputs plus the derived model rows.
struct Dataset {
  std::vector<ShotEvent> events;
  std::vector<ShiftRecord> shifts;
  std::map<EventKey, OnIceContext> contexts;
  std::vector<EligibleShot> eligible;
  std::map<std::string, GameInfo> games;
  std::map<std::string, PlayerInfo> players;

  const GameInfo& game(const std::string& id) const;
};

Dataset build_dataset(std::vector<ShotEvent> events,
                      std::vector<ShiftRecord> shifts);
Dataset load_dataset(const std::filesystem::path& events_path,
                     const std::filesystem::path& shifts_path);

// A dataset scored under one fitted model; predictions align with
// Dataset::eligible.
struct ScoredDataset {
  Dataset data;
  glm::FittedModel model;
  std::vector<glm::Prediction> predictions;
  std::map<EventKey, std::size_t> scored_index;  // event -> eligible slot

  const glm::Prediction* prediction_for(const EventKey& key) const;
};

ScoredDataset score_dataset(Dataset data, glm::FittedModel model);

// Convenience: fit the model on the dataset's own eligible shots.
glm::FittedModel fit_on_dataset(const Dataset& data,
                                const glm::IrlsOptions& options = {});

}  // namespace puckweight
