#include "puckweight/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <ostream>

#include "puckweight/errors.hpp"
#include "puckweight/features.hpp"

namespace puckweight::reliability {

namespace {

constexpr double kInfluenceThreshold = 0.1;

struct Tally {
  std::int64_t shots = 0, goals = 0, missed = 0, blocked = 0;
  double eg = 0.0;
};

void add_attempt(Tally& t, const stats::Attempt& a) {
  if (a.on_goal) {
    t.shots += 1;
    t.goals += a.event->kind == EventKind::Goal ? 1 : 0;
    t.eg += a.p_hat;
  } else if (a.event->kind == EventKind::MissedShot) {
    t.missed += 1;
  } else {
    t.blocked += 1;
  }
}

struct PerGame {
  Tally forward;        // shooting flavor (skater/team-for; goalie shots faced)
  Tally against;        // team-against flavor
  Seconds toi = 0;      // skater toi / team situation seconds (for)
  Seconds toi_against = 0;
  bool entity_is_home = false;
};

using EntityIndex = std::map<std::string, std::map<std::string, PerGame>>;

struct EntitySums {
  Tally forward, against;
  Seconds toi = 0, toi_against = 0;
  double league_sh = 0.0, league_sv = 0.0;
};

std::optional<Strength> interval_strength(int own, int opp) {
  if (own < 3 || own > 5 || opp < 3 || opp > 5) return std::nullopt;
  return features::detailed_strength(own, opp);
}

// Entities are indexed over *all* games here; split_halves applies the
// venue filter when forming halves.
EntityIndex build_index(const ScoredDataset& scored, EntityKind kind,
                        const SplitSpec& spec) {
  EntityIndex index;
  auto attempts = stats::collect_attempts(scored);
  for (const auto& a : attempts) {
    if (!spec.strengths.contains(a.strength)) continue;
    const std::string& gid = a.event->game_id;
    switch (kind) {
      case EntityKind::Skater: {
        PerGame& pg = index[a.event->shooter_id][gid];
        pg.entity_is_home = a.shooter_is_home;
        add_attempt(pg.forward, a);
        break;
      }
      case EntityKind::Goalie: {
        if (!a.on_goal || a.event->goalie_id.empty()) break;
        PerGame& pg = index[a.event->goalie_id][gid];
        pg.entity_is_home = !a.shooter_is_home;
        add_attempt(pg.forward, a);
        break;
      }
      case EntityKind::Team: {
        PerGame& pf = index[a.event->shooter_team][gid];
        pf.entity_is_home = a.shooter_is_home;
        add_attempt(pf.forward, a);
        PerGame& pa = index[a.defending_team][gid];
        pa.entity_is_home = !a.shooter_is_home;
        add_attempt(pa.against, a);
        break;
      }
    }
  }

  // On-ice seconds in scope situations, per game.
  if (kind != EntityKind::Goalie) {
    for (const auto& [gid, game] : scored.data.games) {
      for (const auto& iv : game.intervals) {
        int h = static_cast<int>(iv.home_skaters.size());
        int a = static_cast<int>(iv.away_skaters.size());
        auto cat_home = interval_strength(h, a);
        auto cat_away = interval_strength(a, h);
        bool home_in = cat_home && spec.strengths.contains(*cat_home);
        bool away_in = cat_away && spec.strengths.contains(*cat_away);
        if (kind == EntityKind::Skater) {
          if (home_in) {
            for (const auto& pid : iv.home_skaters) {
              PerGame& pg = index[pid][gid];
              pg.entity_is_home = true;
              pg.toi += iv.duration();
            }
          }
          if (away_in) {
            for (const auto& pid : iv.away_skaters) {
              PerGame& pg = index[pid][gid];
              pg.entity_is_home = false;
              pg.toi += iv.duration();
            }
          }
        } else {
          PerGame& ph = index[game.home_team][gid];
          ph.entity_is_home = true;
          PerGame& pa = index[game.away_team][gid];
          pa.entity_is_home = false;
          if (home_in) {
            ph.toi += iv.duration();
            pa.toi_against += iv.duration();
          }
          if (away_in) {
            pa.toi += iv.duration();
            ph.toi_against += iv.duration();
          }
        }
      }
    }
  }
  return index;
}

double per60(double count, Seconds seconds) {
  return count * 3600.0 / static_cast<double>(seconds);
}

using Eval = std::function<std::optional<double>(const EntitySums&)>;

struct StatDef {
  Eval eval;
  bool against_flavor = false;  // exposure counted on the against tally
};

std::optional<double> ratio(double num, std::int64_t den) {
  if (den <= 0) return std::nullopt;
  return num / static_cast<double>(den);
}

const std::map<std::string, StatDef>& skater_stat_defs() {
  static const std::map<std::string, StatDef> defs = {
      {"eg", {[](const EntitySums& s) -> std::optional<double> {
         return s.forward.eg;
       }}},
      {"g", {[](const EntitySums& s) -> std::optional<double> {
         return static_cast<double>(s.forward.goals);
       }}},
      {"diff_g", {[](const EntitySums& s) -> std::optional<double> {
         return static_cast<double>(s.forward.goals) - s.forward.eg;
       }}},
      {"sh_pct", {[](const EntitySums& s) {
         return ratio(static_cast<double>(s.forward.goals), s.forward.shots);
       }}},
      {"exp_sh_pct", {[](const EntitySums& s) {
         return ratio(s.forward.eg, s.forward.shots);
       }}},
      {"adj_sh_pct", {[](const EntitySums& s) -> std::optional<double> {
         auto sh = ratio(static_cast<double>(s.forward.goals), s.forward.shots);
         auto ex = ratio(s.forward.eg, s.forward.shots);
         if (!sh || !ex) return std::nullopt;
         return s.league_sh + (*sh - *ex);
       }}},
      {"g60", {[](const EntitySums& s) -> std::optional<double> {
         if (s.toi <= 0) return std::nullopt;
         return per60(static_cast<double>(s.forward.goals), s.toi);
       }}},
      {"shots60", {[](const EntitySums& s) -> std::optional<double> {
         if (s.toi <= 0) return std::nullopt;
         return per60(static_cast<double>(s.forward.shots), s.toi);
       }}},
      {"fenwick60", {[](const EntitySums& s) -> std::optional<double> {
         if (s.toi <= 0) return std::nullopt;
         return per60(static_cast<double>(s.forward.shots + s.forward.missed),
                      s.toi);
       }}},
      {"corsi60", {[](const EntitySums& s) -> std::optional<double> {
         if (s.toi <= 0) return std::nullopt;
         return per60(static_cast<double>(s.forward.shots + s.forward.missed +
                                          s.forward.blocked),
                      s.toi);
       }}},
      {"wshots60", {[](const EntitySums& s) -> std::optional<double> {
         if (s.toi <= 0) return std::nullopt;
         return per60(s.forward.eg, s.toi);
       }}},
  };
  return defs;
}

const std::map<std::string, StatDef>& goalie_stat_defs() {
  static const std::map<std::string, StatDef> defs = {
      {"exp_ga", {[](const EntitySums& s) -> std::optional<double> {
         return s.forward.eg;
       }}},
      {"ga", {[](const EntitySums& s) -> std::optional<double> {
         return static_cast<double>(s.forward.goals);
       }}},
      {"diff_ga", {[](const EntitySums& s) -> std::optional<double> {
         return s.forward.eg - static_cast<double>(s.forward.goals);
       }}},
      {"sv_pct", {[](const EntitySums& s) -> std::optional<double> {
         auto sh = ratio(static_cast<double>(s.forward.goals), s.forward.shots);
         if (!sh) return std::nullopt;
         return 1.0 - *sh;
       }}},
      {"exp_sv_pct", {[](const EntitySums& s) -> std::optional<double> {
         auto ex = ratio(s.forward.eg, s.forward.shots);
         if (!ex) return std::nullopt;
         return 1.0 - *ex;
       }}},
      {"adj_sv_pct", {[](const EntitySums& s) -> std::optional<double> {
         auto sh = ratio(static_cast<double>(s.forward.goals), s.forward.shots);
         auto ex = ratio(s.forward.eg, s.forward.shots);
         if (!sh || !ex) return std::nullopt;
         // sv - exp_sv == exp_sh - sh
         return s.league_sv + (*ex - *sh);
       }}},
  };
  return defs;
}

const std::map<std::string, StatDef>& team_stat_defs() {
  auto rate_for = [](std::int64_t Tally::* member) {
    return StatDef{[member](const EntitySums& s) -> std::optional<double> {
      if (s.toi <= 0) return std::nullopt;
      return per60(static_cast<double>(s.forward.*member), s.toi);
    }};
  };
  auto rate_against = [](std::int64_t Tally::* member) {
    return StatDef{[member](const EntitySums& s) -> std::optional<double> {
                     if (s.toi_against <= 0) return std::nullopt;
                     return per60(static_cast<double>(s.against.*member),
                                  s.toi_against);
                   },
                   true};
  };
  static const std::map<std::string, StatDef> defs = {
      {"goals60", rate_for(&Tally::goals)},
      {"shots60", rate_for(&Tally::shots)},
      {"fenwick60",
       {[](const EntitySums& s) -> std::optional<double> {
         if (s.toi <= 0) return std::nullopt;
         return per60(static_cast<double>(s.forward.shots + s.forward.missed),
                      s.toi);
       }}},
      {"corsi60",
       {[](const EntitySums& s) -> std::optional<double> {
         if (s.toi <= 0) return std::nullopt;
         return per60(static_cast<double>(s.forward.shots + s.forward.missed +
                                          s.forward.blocked),
                      s.toi);
       }}},
      {"wshots60",
       {[](const EntitySums& s) -> std::optional<double> {
         if (s.toi <= 0) return std::nullopt;
         return per60(s.forward.eg, s.toi);
       }}},
      {"sh_pct",
       {[](const EntitySums& s) {
         return ratio(static_cast<double>(s.forward.goals), s.forward.shots);
       }}},
      {"exp_sh_pct",
       {[](const EntitySums& s) { return ratio(s.forward.eg, s.forward.shots); }}},
      {"adj_sh_pct",
       {[](const EntitySums& s) -> std::optional<double> {
         auto sh = ratio(static_cast<double>(s.forward.goals), s.forward.shots);
         auto ex = ratio(s.forward.eg, s.forward.shots);
         if (!sh || !ex) return std::nullopt;
         return s.league_sh + (*sh - *ex);
       }}},
      {"goals_against60", rate_against(&Tally::goals)},
      {"shots_against60", rate_against(&Tally::shots)},
      {"fenwick_against60",
       {[](const EntitySums& s) -> std::optional<double> {
          if (s.toi_against <= 0) return std::nullopt;
          return per60(static_cast<double>(s.against.shots + s.against.missed),
                       s.toi_against);
        },
        true}},
      {"corsi_against60",
       {[](const EntitySums& s) -> std::optional<double> {
          if (s.toi_against <= 0) return std::nullopt;
          return per60(static_cast<double>(s.against.shots + s.against.missed +
                                           s.against.blocked),
                       s.toi_against);
        },
        true}},
      {"wshots_against60",
       {[](const EntitySums& s) -> std::optional<double> {
          if (s.toi_against <= 0) return std::nullopt;
          return per60(s.against.eg, s.toi_against);
        },
        true}},
      {"sv_pct",
       {[](const EntitySums& s) -> std::optional<double> {
          auto sh = ratio(static_cast<double>(s.against.goals), s.against.shots);
          if (!sh) return std::nullopt;
          return 1.0 - *sh;
        },
        true}},
      {"exp_sv_pct",
       {[](const EntitySums& s) -> std::optional<double> {
          auto ex = ratio(s.against.eg, s.against.shots);
          if (!ex) return std::nullopt;
          return 1.0 - *ex;
        },
        true}},
      {"adj_sv_pct",
       {[](const EntitySums& s) -> std::optional<double> {
          auto sh = ratio(static_cast<double>(s.against.goals), s.against.shots);
          auto ex = ratio(s.against.eg, s.against.shots);
          if (!sh || !ex) return std::nullopt;
          return s.league_sv + (*ex - *sh);
        },
        true}},
  };
  return defs;
}

const std::map<std::string, StatDef>& defs_for(EntityKind kind) {
  switch (kind) {
    case EntityKind::Skater: return skater_stat_defs();
    case EntityKind::Goalie: return goalie_stat_defs();
    case EntityKind::Team: return team_stat_defs();
  }
  return skater_stat_defs();
}

const StatDef& find_stat(EntityKind kind, const std::string& name) {
  const auto& defs = defs_for(kind);
  auto it = defs.find(name);
  if (it == defs.end()) {
    std::string known;
    for (const auto& [n, d] : defs) {
      if (!known.empty()) known += ", ";
      known += n;
    }
    throw Error(ErrorCategory::Usage,
                "unknown statistic '" + name + "'; known: " + known);
  }
  return it->second;
}

double loo_r(const std::vector<double>& x, const std::vector<double>& y,
             std::size_t skip) {
  std::vector<double> xs, ys;
  xs.reserve(x.size() - 1);
  ys.reserve(y.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i == skip) continue;
    xs.push_back(x[i]);
    ys.push_back(y[i]);
  }
  return pearson(xs, ys);
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCategory::Data, "pearson needs at least 2 paired points");
  }
  double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  // Round-off in the mean leaves ulp-sized deviations on exactly-constant
  // input; treat those as zero variance too.
  double tx = 1e-12 * (std::abs(mx) + 1.0);
  double ty = 1e-12 * (std::abs(my) + 1.0);
  if (sxx <= n * tx * tx || syy <= n * ty * ty) {
    throw Error(ErrorCategory::Numeric,
                "pearson undefined: a variable has zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_halves(
    std::span<const GameRef> games, const SplitSpec& spec) {
  std::vector<std::string> a, b;
  std::size_t pos = 0;
  for (const auto& g : games) {
    if (spec.venue == stats::Venue::AwayOnly && g.entity_is_home) continue;
    ((pos % 2 == 0) ? a : b).push_back(g.game_id);
    ++pos;
  }
  return {std::move(a), std::move(b)};
}

CorrelationReport predictive(const ScoredDataset& scored, EntityKind kind,
                             const std::string& stat,
                             const std::string& target,
                             const SplitSpec& spec) {
  const StatDef& stat_def = find_stat(kind, stat);
  const StatDef& target_def = find_stat(kind, target);

  stats::StatScope scope;
  scope.strengths = spec.strengths;
  scope.venue = spec.venue;
  double league_sh = stats::league_shooting_pct(scored, scope);
  double league_sv = stats::league_save_pct(scored, scope);

  EntityIndex index = build_index(scored, kind, spec);

  std::vector<double> xs, ys;
  std::vector<std::string> entities;
  for (const auto& [entity, games] : index) {
    // Appearance sequence ordered by season, then per-season ordinal.
    std::vector<const std::pair<const std::string, PerGame>*> ordered;
    ordered.reserve(games.size());
    for (const auto& kv : games) ordered.push_back(&kv);
    std::sort(ordered.begin(), ordered.end(), [&](auto* lhs, auto* rhs) {
      const GameInfo& gl = scored.data.game(lhs->first);
      const GameInfo& gr = scored.data.game(rhs->first);
      if (gl.season != gr.season) return gl.season < gr.season;
      return gl.ordinal < gr.ordinal;
    });
    std::vector<GameRef> refs;
    refs.reserve(ordered.size());
    for (auto* kv : ordered) {
      refs.push_back({kv->first, kv->second.entity_is_home});
    }
    auto [half_a, half_b] = split_halves(refs, spec);

    auto accumulate = [&](const std::vector<std::string>& ids) {
      EntitySums sums;
      sums.league_sh = league_sh;
      sums.league_sv = league_sv;
      for (const auto& gid : ids) {
        const PerGame& pg = games.at(gid);
        sums.forward.shots += pg.forward.shots;
        sums.forward.goals += pg.forward.goals;
        sums.forward.missed += pg.forward.missed;
        sums.forward.blocked += pg.forward.blocked;
        sums.forward.eg += pg.forward.eg;
        sums.against.shots += pg.against.shots;
        sums.against.goals += pg.against.goals;
        sums.against.missed += pg.against.missed;
        sums.against.blocked += pg.against.blocked;
        sums.against.eg += pg.against.eg;
        sums.toi += pg.toi;
        sums.toi_against += pg.toi_against;
      }
      return sums;
    };
    EntitySums sums_a = accumulate(half_a);
    EntitySums sums_b = accumulate(half_b);

    auto exposure = [](const EntitySums& s, const StatDef& def) {
      return def.against_flavor ? s.against.shots : s.forward.shots;
    };
    if (exposure(sums_a, stat_def) < spec.min_exposure) continue;
    if (exposure(sums_b, target_def) < spec.min_exposure) continue;

    auto va = stat_def.eval(sums_a);
    auto vb = target_def.eval(sums_b);
    if (!va || !vb) continue;
    xs.push_back(*va);
    ys.push_back(*vb);
    entities.push_back(entity);
  }

  if (xs.size() < 3) {
    throw Error(ErrorCategory::Data,
                "fewer than 3 qualifying entities (" +
                    std::to_string(xs.size()) + ") for " + stat + " vs " +
                    target);
  }

  CorrelationReport report;
  report.stat_name = stat;
  report.target_name = target;
  report.n = static_cast<int>(xs.size());
  report.r = pearson(xs, ys);
  if (xs.size() >= 4) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double r_without = 0.0;
      try {
        r_without = loo_r(xs, ys, i);
      } catch (const Error&) {
        continue;  // remaining points degenerate to zero variance
      }
      if (std::abs(r_without - report.r) > kInfluenceThreshold) {
        report.flagged_outliers.push_back(entities[i]);
      }
    }
  }
  return report;
}

CorrelationReport reliability(const ScoredDataset& scored, EntityKind kind,
                              const std::string& stat, const SplitSpec& spec) {
  return predictive(scored, kind, stat, stat, spec);
}

const std::vector<std::string>& stat_names(EntityKind kind) {
  auto build = [](const std::map<std::string, StatDef>& defs) {
    std::vector<std::string> names;
    for (const auto& [n, d] : defs) names.push_back(n);
    return names;
  };
  static const std::vector<std::string> skater = build(skater_stat_defs());
  static const std::vector<std::string> goalie = build(goalie_stat_defs());
  static const std::vector<std::string> team = build(team_stat_defs());
  switch (kind) {
    case EntityKind::Skater: return skater;
    case EntityKind::Goalie: return goalie;
    case EntityKind::Team: return team;
  }
  return skater;
}

Table report_table(std::span<const CorrelationReport> reports) {
  Table t;
  t.columns = {"Stat", "Target", "r", "n", "Flagged"};
  t.formats = {ColumnFormat::Text, ColumnFormat::Text, ColumnFormat::Fixed3,
               ColumnFormat::Integer, ColumnFormat::Text};
  for (const auto& rep : reports) {
    std::string flagged;
    for (std::size_t i = 0; i < rep.flagged_outliers.size(); ++i) {
      if (i) flagged += ';';
      flagged += rep.flagged_outliers[i];
    }
    t.add_row({rep.stat_name, rep.target_name, rep.r,
               static_cast<std::int64_t>(rep.n), flagged});
  }
  return t;
}

void write_plot_data(std::ostream& out,
                     std::span<const CorrelationReport> reports) {
  out << "stat_name,r\n";
  for (const auto& rep : reports) {
    out << rep.stat_name << ',' << format_double(rep.r, ColumnFormat::Full)
        << '\n';
  }
}

}  // namespace puckweight::reliability
