#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "puckweight/pipeline.hpp"
#include "puckweight/stats.hpp"
#include "puckweight/tables.hpp"

namespace puckweight::reliability {

enum class EntityKind { Skater, Goalie, Team };

struct SplitSpec {
  stats::Venue venue = stats::Venue::AwayOnly;
  std::int64_t min_exposure = 0;  // in-scope shots required in each half
  std::set<Strength> strengths = {Strength::EV55};
};

struct CorrelationReport {
  std::string stat_name;
  std::string target_name;
  double r = 0.0;
  int n = 0;  // qualifying entities
  // Entities whose removal moves r by more than 0.1 absolute.
  std::vector<std::string> flagged_outliers;
};

// Pearson correlation; throws on fewer than two points or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

struct GameRef {
  std::string game_id;
  bool entity_is_home = false;
};

// Venue-filters the entity's game sequence, then assigns odd positions
// (1st, 3rd, ...) to half A and even positions to half B. Filtering first
// makes the split idempotent under pre-filtered input.
std::pair<std::vector<std::string>, std::vector<std::string>> split_halves(
    std::span<const GameRef> games, const SplitSpec& spec);

// Correlation between a statistic in an entity's odd games and a (possibly
// different) statistic in its even games. Entities must clear min_exposure
// in both halves; fewer than three qualifying entities is an error.
CorrelationReport predictive(const ScoredDataset& scored, EntityKind kind,
                             const std::string& stat,
                             const std::string& target, const SplitSpec& spec);

// Split-half reliability: predictive(stat, stat).
CorrelationReport reliability(const ScoredDataset& scored, EntityKind kind,
                              const std::string& stat, const SplitSpec& spec);

const std::vector<std::string>& stat_names(EntityKind kind);

Table report_table(std::span<const CorrelationReport> reports);
// Plot-data rows (stat_name, r) for bar-chart consumption.
void write_plot_data(std::ostream& out,
                     std::span<const CorrelationReport> reports);

}  // namespace puckweight::reliability
