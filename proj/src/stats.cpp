#include "puckweight/stats.hpp"

#include <algorithm>
#include <cmath>

#include "puckweight/errors.hpp"
#include "puckweight/features.hpp"

namespace puckweight::stats {

namespace {

bool venue_keeps(Venue venue, bool entity_is_home) {
  return venue == Venue::All || !entity_is_home;
}

double per60(double count, Seconds seconds) {
  if (seconds <= 0) return 0.0;
  return count * 3600.0 / static_cast<double>(seconds);
}

struct Tally {
  std::int64_t shots = 0, goals = 0, missed = 0, blocked = 0;
  double eg = 0.0;
  double var_sum = 0.0;  // binomial + delta-method variance of eg
};

void add(Tally& t, const Attempt& a) {
  if (a.on_goal) {
    t.shots += 1;
    t.goals += a.event->kind == EventKind::Goal ? 1 : 0;
    t.eg += a.p_hat;
    t.var_sum += a.p_hat * (1.0 - a.p_hat) + a.variance;
  } else if (a.event->kind == EventKind::MissedShot) {
    t.missed += 1;
  } else {
    t.blocked += 1;
  }
}

std::optional<Strength> interval_strength(int own, int opp) {
  if (own < 3 || own > 5 || opp < 3 || opp > 5) return std::nullopt;
  return features::detailed_strength(own, opp);
}

}  // namespace

std::vector<Attempt> collect_attempts(const ScoredDataset& scored) {
  std::vector<Attempt> out;
  out.reserve(scored.data.events.size());
  for (const auto& e : scored.data.events) {
    if (!e.is_shot_class()) continue;
    if (e.zone != ZoneKind::Offensive || !e.goalie_on_ice) continue;
    Attempt a;
    a.event = &e;
    a.shooter_is_home = e.shooter_team == e.home_team;
    const GameInfo& game = scored.data.game(e.game_id);
    a.defending_team = a.shooter_is_home ? game.away_team : game.home_team;
    a.on_goal = e.is_on_goal();
    if (a.on_goal) {
      auto it = scored.scored_index.find(event_key(e));
      if (it == scored.scored_index.end()) {
        throw Error(ErrorCategory::Data,
                    "unscored eligible shot in game " + e.game_id);
      }
      const auto& pred = scored.predictions[it->second];
      const auto& fv = scored.data.eligible[it->second].fv;
      a.p_hat = pred.probability;
      a.variance = pred.std_error * pred.std_error;
      a.strength = fv.strength;
    } else {
      auto ctx = scored.data.contexts.find(event_key(e));
      if (ctx == scored.data.contexts.end()) continue;
      a.strength = features::detailed_strength(ctx->second.strength_for,
                                               ctx->second.strength_against);
    }
    out.push_back(std::move(a));
  }
  return out;
}

double league_shooting_pct(const ScoredDataset& scored,
                           const StatScope& scope) {
  std::int64_t shots = 0, goals = 0;
  for (const Attempt& a : collect_attempts(scored)) {
    if (!a.on_goal || !scope.strengths.contains(a.strength)) continue;
    if (!venue_keeps(scope.venue, a.shooter_is_home)) continue;
    shots += 1;
    goals += a.event->kind == EventKind::Goal ? 1 : 0;
  }
  if (shots == 0) return 0.0;
  return static_cast<double>(goals) / static_cast<double>(shots);
}

double league_save_pct(const ScoredDataset& scored, const StatScope& scope) {
  std::int64_t shots = 0, goals = 0;
  for (const Attempt& a : collect_attempts(scored)) {
    if (!a.on_goal || !scope.strengths.contains(a.strength)) continue;
    // Defender is home when the shooter is not.
    if (!venue_keeps(scope.venue, !a.shooter_is_home)) continue;
    shots += 1;
    goals += a.event->kind == EventKind::Goal ? 1 : 0;
  }
  if (shots == 0) return 1.0;
  return 1.0 - static_cast<double>(goals) / static_cast<double>(shots);
}

std::map<std::string, Seconds> skater_scope_toi(const ScoredDataset& scored,
                                                const StatScope& scope) {
  std::map<std::string, Seconds> toi;
  for (const auto& [gid, game] : scored.data.games) {
    for (const auto& iv : game.intervals) {
      int h = static_cast<int>(iv.home_skaters.size());
      int a = static_cast<int>(iv.away_skaters.size());
      auto cat_home = interval_strength(h, a);
      auto cat_away = interval_strength(a, h);
      // Away skaters always qualify; home skaters only without the
      // away-only venue filter.
      if (scope.venue == Venue::All && cat_home &&
          scope.strengths.contains(*cat_home)) {
        for (const auto& pid : iv.home_skaters) toi[pid] += iv.duration();
      }
      if (cat_away && scope.strengths.contains(*cat_away)) {
        for (const auto& pid : iv.away_skaters) toi[pid] += iv.duration();
      }
    }
  }
  return toi;
}

std::vector<SkaterStatLine> skater_stats(const ScoredDataset& scored,
                                         const StatScope& scope,
                                         double league_sh_pct) {
  std::map<std::string, Tally> tallies;
  for (const Attempt& a : collect_attempts(scored)) {
    if (!scope.strengths.contains(a.strength)) continue;
    if (!venue_keeps(scope.venue, a.shooter_is_home)) continue;
    add(tallies[a.event->shooter_id], a);
  }
  auto toi = skater_scope_toi(scored, scope);

  std::vector<SkaterStatLine> lines;
  for (const auto& [pid, t] : tallies) {
    if (t.shots == 0 || t.shots < scope.min_shots) continue;
    auto pit = scored.data.players.find(pid);
    if (pit == scored.data.players.end() ||
        pit->second.position == PlayerPosition::Goalie) {
      continue;
    }
    SkaterStatLine line;
    line.player_id = pid;
    line.position = pit->second.position;
    line.team = pit->second.team;
    line.eg = t.eg;
    line.g = t.goals;
    line.diff_g = static_cast<double>(t.goals) - t.eg;
    line.g_err = std::sqrt(t.var_sum);
    line.shots = t.shots;
    line.sh_pct = static_cast<double>(t.goals) / static_cast<double>(t.shots);
    line.exp_sh_pct = t.eg / static_cast<double>(t.shots);
    line.adj_sh_pct = league_sh_pct + (line.sh_pct - line.exp_sh_pct);
    line.s_err = line.g_err / static_cast<double>(t.shots);
    line.missed = t.missed;
    line.blocked = t.blocked;
    auto tit = toi.find(pid);
    line.toi_seconds = tit == toi.end() ? 0 : tit->second;
    line.g60 = per60(static_cast<double>(t.goals), line.toi_seconds);
    line.shots60 = per60(static_cast<double>(t.shots), line.toi_seconds);
    line.fenwick60 =
        per60(static_cast<double>(t.shots + t.missed), line.toi_seconds);
    line.corsi60 = per60(static_cast<double>(t.shots + t.missed + t.blocked),
                         line.toi_seconds);
    line.wshots60 = per60(t.eg, line.toi_seconds);
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end(),
            [](const SkaterStatLine& a, const SkaterStatLine& b) {
              if (a.diff_g != b.diff_g) return a.diff_g > b.diff_g;
              return a.player_id < b.player_id;
            });
  return lines;
}

std::vector<GoalieStatLine> goalie_stats(const ScoredDataset& scored,
                                         const StatScope& scope,
                                         double league_sv_pct) {
  std::map<std::string, Tally> tallies;
  for (const Attempt& a : collect_attempts(scored)) {
    if (!a.on_goal) continue;  // only shots that reached the net
    if (!scope.strengths.contains(a.strength)) continue;
    if (!venue_keeps(scope.venue, !a.shooter_is_home)) continue;
    if (a.event->goalie_id.empty()) continue;
    add(tallies[a.event->goalie_id], a);
  }

  std::vector<GoalieStatLine> lines;
  for (const auto& [gid, t] : tallies) {
    if (t.shots == 0 || t.shots < scope.min_shots) continue;
    GoalieStatLine line;
    line.goalie_id = gid;
    auto pit = scored.data.players.find(gid);
    if (pit != scored.data.players.end()) line.team = pit->second.team;
    line.exp_ga = t.eg;
    line.ga = t.goals;
    line.diff_ga = t.eg - static_cast<double>(t.goals);
    line.g_err = std::sqrt(t.var_sum);
    line.shot_a = t.shots;
    line.sv_pct =
        1.0 - static_cast<double>(t.goals) / static_cast<double>(t.shots);
    line.exp_sv_pct = 1.0 - t.eg / static_cast<double>(t.shots);
    line.adj_sv_pct = league_sv_pct + (line.sv_pct - line.exp_sv_pct);
    line.err = line.g_err / static_cast<double>(t.shots);
    line.change = line.adj_sv_pct - line.sv_pct;
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end(),
            [](const GoalieStatLine& a, const GoalieStatLine& b) {
              if (a.diff_ga != b.diff_ga) return a.diff_ga > b.diff_ga;
              return a.goalie_id < b.goalie_id;
            });
  return lines;
}

std::vector<TeamStatLine> team_stats(const ScoredDataset& scored,
                                     const StatScope& scope, TeamSide side) {
  std::map<std::string, Tally> tallies;
  for (const Attempt& a : collect_attempts(scored)) {
    if (!scope.strengths.contains(a.strength)) continue;
    bool entity_is_home =
        side == TeamSide::For ? a.shooter_is_home : !a.shooter_is_home;
    if (!venue_keeps(scope.venue, entity_is_home)) continue;
    const std::string& team =
        side == TeamSide::For ? a.event->shooter_team : a.defending_team;
    add(tallies[team], a);
  }

  // Situation time: for the For side, seconds the team itself is in a scope
  // situation; for the Against side, seconds its opponent is.
  std::map<std::string, Seconds> situation;
  for (const auto& [gid, game] : scored.data.games) {
    for (const auto& iv : game.intervals) {
      int h = static_cast<int>(iv.home_skaters.size());
      int a = static_cast<int>(iv.away_skaters.size());
      auto cat_home = interval_strength(h, a);
      auto cat_away = interval_strength(a, h);
      auto credit = [&](const std::string& team, bool team_is_home,
                        const std::optional<Strength>& cat) {
        if (!cat || !scope.strengths.contains(*cat)) return;
        if (!venue_keeps(scope.venue, team_is_home)) return;
        situation[team] += iv.duration();
      };
      if (side == TeamSide::For) {
        credit(game.home_team, true, cat_home);
        credit(game.away_team, false, cat_away);
      } else {
        credit(game.home_team, true, cat_away);
        credit(game.away_team, false, cat_home);
      }
    }
  }

  double league = side == TeamSide::For ? league_shooting_pct(scored, scope)
                                        : league_save_pct(scored, scope);

  std::vector<TeamStatLine> lines;
  for (const auto& [team, t] : tallies) {
    auto sit = situation.find(team);
    if (sit == situation.end() || sit->second <= 0) continue;
    TeamStatLine line;
    line.team = team;
    line.side = side;
    line.situation_seconds = sit->second;
    line.goals = t.goals;
    line.shots = t.shots;
    line.missed = t.missed;
    line.blocked = t.blocked;
    line.eg = t.eg;
    line.err = std::sqrt(t.var_sum);
    line.goals60 = per60(static_cast<double>(t.goals), sit->second);
    line.shots60 = per60(static_cast<double>(t.shots), sit->second);
    line.fenwick60 =
        per60(static_cast<double>(t.shots + t.missed), sit->second);
    line.corsi60 = per60(static_cast<double>(t.shots + t.missed + t.blocked),
                         sit->second);
    line.wshots60 = per60(t.eg, sit->second);
    if (t.shots > 0) {
      double made = static_cast<double>(t.goals) / static_cast<double>(t.shots);
      double expected = t.eg / static_cast<double>(t.shots);
      if (side == TeamSide::For) {
        line.diff = static_cast<double>(t.goals) - t.eg;
        line.pct = made;
        line.exp_pct = expected;
      } else {
        line.diff = t.eg - static_cast<double>(t.goals);
        line.pct = 1.0 - made;
        line.exp_pct = 1.0 - expected;
      }
      line.adj_pct = league + (line.pct - line.exp_pct);
    }
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end(),
            [](const TeamStatLine& a, const TeamStatLine& b) {
              if (a.wshots60 != b.wshots60) return a.wshots60 > b.wshots60;
              return a.team < b.team;
            });
  return lines;
}

Table skaters_table(const std::vector<SkaterStatLine>& lines) {
  Table t;
  t.columns = {"Player", "Pos",    "Team",   "EG",     "G",
               "DiffG",  "GErr",   "Shots",  "Sh%",    "ExpSh%",
               "AdjSh%", "SErr",   "TOI",    "G60",    "Shots60",
               "Fenwick60", "Corsi60", "WShots60"};
  t.formats = {ColumnFormat::Text,    ColumnFormat::Text,
               ColumnFormat::Text,    ColumnFormat::General,
               ColumnFormat::Integer, ColumnFormat::General,
               ColumnFormat::General, ColumnFormat::Integer,
               ColumnFormat::Fixed3,  ColumnFormat::Fixed3,
               ColumnFormat::Fixed3,  ColumnFormat::General,
               ColumnFormat::Integer, ColumnFormat::General,
               ColumnFormat::General, ColumnFormat::General,
               ColumnFormat::General, ColumnFormat::General};
  for (const auto& l : lines) {
    t.add_row({l.player_id, std::string(to_token(l.position)), l.team, l.eg,
               l.g, l.diff_g, l.g_err, l.shots, l.sh_pct, l.exp_sh_pct,
               l.adj_sh_pct, l.s_err, l.toi_seconds, l.g60, l.shots60,
               l.fenwick60, l.corsi60, l.wshots60});
  }
  return t;
}

Table goalies_table(const std::vector<GoalieStatLine>& lines) {
  Table t;
  t.columns = {"Goalie", "Team", "ExpGA", "GA",     "DiffGA", "GErr",
               "ShotA",  "Sv%",  "ExpSv%", "AdjSv%", "Err",    "Change"};
  t.formats = {ColumnFormat::Text,    ColumnFormat::Text,
               ColumnFormat::General, ColumnFormat::Integer,
               ColumnFormat::General, ColumnFormat::General,
               ColumnFormat::Integer, ColumnFormat::Fixed3,
               ColumnFormat::Fixed3,  ColumnFormat::Fixed3,
               ColumnFormat::General, ColumnFormat::Fixed3};
  for (const auto& l : lines) {
    t.add_row({l.goalie_id, l.team, l.exp_ga, l.ga, l.diff_ga, l.g_err,
               l.shot_a, l.sv_pct, l.exp_sv_pct, l.adj_sv_pct, l.err,
               l.change});
  }
  return t;
}

Table teams_table(const std::vector<TeamStatLine>& lines) {
  bool against = !lines.empty() && lines.front().side == TeamSide::Against;
  Table t;
  t.columns = {"Team",
               "Side",
               "Seconds",
               "Goals60",
               "Shots60",
               "Fenwick60",
               "Corsi60",
               "WShots60",
               against ? "ExpGA" : "EG",
               against ? "DiffGA" : "DiffG",
               "Err",
               against ? "Sv%" : "Sh%",
               against ? "ExpSv%" : "ExpSh%",
               against ? "AdjSv%" : "AdjSh%"};
  t.formats = {ColumnFormat::Text,    ColumnFormat::Text,
               ColumnFormat::Integer, ColumnFormat::General,
               ColumnFormat::General, ColumnFormat::General,
               ColumnFormat::General, ColumnFormat::General,
               ColumnFormat::General, ColumnFormat::General,
               ColumnFormat::General, ColumnFormat::Fixed3,
               ColumnFormat::Fixed3,  ColumnFormat::Fixed3};
  for (const auto& l : lines) {
    t.add_row({l.team, std::string(l.side == TeamSide::For ? "for" : "against"),
               l.situation_seconds, l.goals60, l.shots60, l.fenwick60,
               l.corsi60, l.wshots60, l.eg, l.diff, l.err, l.pct, l.exp_pct,
               l.adj_pct});
  }
  return t;
}

}  // namespace puckweight::stats
