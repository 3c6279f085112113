#include "puckweight/apm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/Dense>

#include "puckweight/errors.hpp"

namespace puckweight::apm {

namespace {

ZoneKind flip_zone(ZoneKind z) {
  switch (z) {
    case ZoneKind::Offensive: return ZoneKind::Defensive;
    case ZoneKind::Defensive: return ZoneKind::Offensive;
    case ZoneKind::Neutral: return ZoneKind::Neutral;
  }
  return ZoneKind::Neutral;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Situation mirror(Situation s) {
  if (s == Situation::PP) return Situation::SH;
  if (s == Situation::SH) return Situation::PP;
  return Situation::EV;
}

}  // namespace

const char* outcome_letter(OutcomeKind o) {
  switch (o) {
    case OutcomeKind::Goals: return "G";
    case OutcomeKind::Wshots: return "W";
    case OutcomeKind::Shots: return "S";
    case OutcomeKind::Fenwick: return "F";
    case OutcomeKind::Corsi: return "C";
  }
  return "?";
}

const char* outcome_name(OutcomeKind o) {
  switch (o) {
    case OutcomeKind::Goals: return "goals";
    case OutcomeKind::Wshots: return "wshots";
    case OutcomeKind::Shots: return "shots";
    case OutcomeKind::Fenwick: return "fenwick";
    case OutcomeKind::Corsi: return "corsi";
  }
  return "?";
}

std::optional<OutcomeKind> outcome_from_name(const std::string& name) {
  for (OutcomeKind o : {OutcomeKind::Goals, OutcomeKind::Wshots,
                        OutcomeKind::Shots, OutcomeKind::Fenwick,
                        OutcomeKind::Corsi}) {
    if (name == outcome_name(o)) return o;
  }
  return std::nullopt;
}

const char* situation_name(Situation s) {
  switch (s) {
    case Situation::EV: return "EV";
    case Situation::PP: return "PP";
    case Situation::SH: return "SH";
  }
  return "?";
}

double Outcomes::get(OutcomeKind o) const {
  switch (o) {
    case OutcomeKind::Goals: return static_cast<double>(goals);
    case OutcomeKind::Wshots: return wshots;
    case OutcomeKind::Shots: return static_cast<double>(shots);
    case OutcomeKind::Fenwick: return static_cast<double>(fenwick);
    case OutcomeKind::Corsi: return static_cast<double>(corsi);
  }
  return 0.0;
}

Situation ApmObservation::situation_for(bool home_side) const {
  switch (situation) {
    case ObsSituation::EV: return Situation::EV;
    case ObsSituation::PPHome: return home_side ? Situation::PP : Situation::SH;
    case ObsSituation::PPAway: return home_side ? Situation::SH : Situation::PP;
  }
  return Situation::EV;
}

std::vector<ApmObservation> build_observations(const ScoredDataset& scored) {
  std::vector<ApmObservation> observations;

  std::map<std::string, std::vector<const ShotEvent*>> events_by_game;
  for (const auto& e : scored.data.events) {
    events_by_game[e.game_id].push_back(&e);
  }

  for (const auto& [gid, game] : scored.data.games) {
    if (game.intervals.empty()) continue;
    std::size_t first = observations.size();
    ZoneKind carried = ZoneKind::Neutral;

    // Zone of the row sitting exactly on each boundary second, converted to
    // the home perspective.
    std::map<Seconds, ZoneKind> zone_at;
    auto ev_it = events_by_game.find(gid);
    if (ev_it != events_by_game.end()) {
      for (const ShotEvent* e : ev_it->second) {
        if (zone_at.contains(e->clock)) continue;
        ZoneKind z = e->shooter_team == game.home_team ? e->zone
                                                       : flip_zone(e->zone);
        zone_at.emplace(e->clock, z);
      }
    }

    for (const auto& iv : game.intervals) {
      ApmObservation obs;
      obs.game_id = gid;
      obs.start = iv.start;
      obs.end = iv.end;
      obs.home_skaters = iv.home_skaters;
      obs.away_skaters = iv.away_skaters;
      if (obs.home_skaters.empty() || obs.away_skaters.empty()) {
        throw Error(ErrorCategory::Data,
                    "no skaters on ice in game " + gid + " at t=" +
                        std::to_string(iv.start));
      }
      int h = static_cast<int>(obs.home_skaters.size());
      int a = static_cast<int>(obs.away_skaters.size());
      obs.situation = h == a ? ObsSituation::EV
                     : h > a ? ObsSituation::PPHome
                             : ObsSituation::PPAway;
      auto zit = zone_at.find(iv.start);
      if (zit != zone_at.end()) carried = zit->second;
      obs.zone_start_home = carried;
      observations.push_back(std::move(obs));
    }

    // Outcome tallies; every event must land inside some observation.
    if (ev_it != events_by_game.end()) {
      std::span<ApmObservation> game_obs(observations.data() + first,
                                         observations.size() - first);
      for (const ShotEvent* e : ev_it->second) {
        auto it = std::upper_bound(
            game_obs.begin(), game_obs.end(), e->clock,
            [](Seconds t, const ApmObservation& o) { return t < o.start; });
        if (it == game_obs.begin() || e->clock >= std::prev(it)->end) {
          throw Error(ErrorCategory::Data,
                      "event at t=" + std::to_string(e->clock) + " in game " +
                          gid + " falls outside every observation "
                          "(clock inconsistency)");
        }
        if (!e->is_shot_class()) continue;
        ApmObservation& obs = *std::prev(it);
        Outcomes& side =
            e->shooter_team == game.home_team ? obs.home : obs.away;
        side.corsi += 1;
        if (e->kind != EventKind::BlockedShot) side.fenwick += 1;
        if (e->is_on_goal()) side.shots += 1;
        if (e->kind == EventKind::Goal) side.goals += 1;
        if (const auto* pred = scored.prediction_for(event_key(*e))) {
          side.wshots += pred->probability;
        }
      }
    }
  }
  return observations;
}

ApmDesign build_design(std::span<const ApmObservation> observations,
                       const DesignOptions& options) {
  if (observations.empty()) {
    throw Error(ErrorCategory::Data, "no observations to build a design from");
  }

  std::set<std::string> seen;
  for (const auto& obs : observations) {
    seen.insert(obs.home_skaters.begin(), obs.home_skaters.end());
    seen.insert(obs.away_skaters.begin(), obs.away_skaters.end());
  }
  ApmDesign design;
  for (const auto& pid : options.roster) {
    if (!seen.contains(pid)) {
      design.warnings.push_back("player " + pid +
                                " appears in no observation; dropped");
    }
  }
  design.players.assign(seen.begin(), seen.end());
  std::map<std::string, std::size_t> player_col;
  for (std::size_t i = 0; i < design.players.size(); ++i) {
    player_col[design.players[i]] = i;
  }

  const std::size_t zone_cols = options.zone_indicators ? 2 : 0;
  design.offense_start = 1 + zone_cols;
  design.defense_start = design.offense_start + design.players.size();
  const std::size_t n_cols = design.defense_start + design.players.size();

  design.col_names.reserve(n_cols);
  design.col_names.push_back("(Intercept)");
  if (options.zone_indicators) {
    design.col_names.push_back("zone_offensive");
    design.col_names.push_back("zone_defensive");
  }
  for (const auto& pid : design.players) design.col_names.push_back("off_" + pid);
  for (const auto& pid : design.players) design.col_names.push_back("def_" + pid);
  design.penalized.assign(n_cols, false);
  for (std::size_t c = design.offense_start; c < n_cols; ++c) {
    design.penalized[c] = true;
  }

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<double> responses, weights;
  auto add_row = [&](const ApmObservation& obs, bool home_offense) {
    if (options.offense_situation &&
        obs.situation_for(home_offense) != *options.offense_situation) {
      return;
    }
    const auto& offense = home_offense ? obs.home_skaters : obs.away_skaters;
    const auto& defense = home_offense ? obs.away_skaters : obs.home_skaters;
    const Outcomes& out = home_offense ? obs.home : obs.away;
    const int row = static_cast<int>(responses.size());
    triplets.emplace_back(row, 0, 1.0);
    if (options.zone_indicators) {
      ZoneKind z = home_offense ? obs.zone_start_home
                                : flip_zone(obs.zone_start_home);
      if (z == ZoneKind::Offensive) triplets.emplace_back(row, 1, 1.0);
      if (z == ZoneKind::Defensive) triplets.emplace_back(row, 2, 1.0);
    }
    for (const auto& pid : offense) {
      triplets.emplace_back(
          row, static_cast<int>(design.offense_start + player_col[pid]), 1.0);
    }
    for (const auto& pid : defense) {
      triplets.emplace_back(
          row, static_cast<int>(design.defense_start + player_col[pid]), 1.0);
    }
    double dur = static_cast<double>(obs.duration());
    responses.push_back(out.get(options.outcome) * 3600.0 / dur);
    weights.push_back(dur);
    design.row_game.push_back(obs.game_id);
  };
  for (const auto& obs : observations) {
    add_row(obs, true);
    add_row(obs, false);
  }

  design.X.resize(static_cast<Eigen::Index>(responses.size()),
                  static_cast<Eigen::Index>(n_cols));
  design.X.setFromTriplets(triplets.begin(), triplets.end());
  design.y = Eigen::Map<Eigen::VectorXd>(responses.data(),
                                         static_cast<Eigen::Index>(
                                             responses.size()));
  design.w = Eigen::Map<Eigen::VectorXd>(weights.data(),
                                         static_cast<Eigen::Index>(
                                             weights.size()));
  return design;
}

Eigen::VectorXd ridge_solve(const Eigen::SparseMatrix<double>& X,
                            const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                            const std::vector<bool>& penalized,
                            double lambda) {
  const Eigen::Index p = X.cols();
  if (lambda < 0) {
    throw Error(ErrorCategory::Usage, "lambda must be >= 0");
  }
  if (static_cast<Eigen::Index>(penalized.size()) != p) {
    throw Error(ErrorCategory::Data, "penalty mask does not match columns");
  }

  Eigen::SparseMatrix<double> Xw = w.asDiagonal() * X;
  Eigen::MatrixXd A = Eigen::MatrixXd(X.transpose() * Xw);
  Eigen::VectorXd b = X.transpose() * (w.asDiagonal() * y);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (penalized[static_cast<std::size_t>(j)]) A(j, j) += lambda;
  }

  if (lambda == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
      throw Error(ErrorCategory::Numeric,
                  "design is rank deficient; a positive ridge penalty is "
                  "required");
    }
    return qr.solve(b);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  Eigen::VectorXd beta = ldlt.solve(b);
  if (ldlt.info() != Eigen::Success || !beta.allFinite()) {
    throw Error(ErrorCategory::Numeric,
                "ridge normal equations are singular; the unpenalized block "
                "may be collinear");
  }
  return beta;
}

ApmResult fit_apm(std::span<const ApmObservation> observations,
                  const Dataset& data, const ApmOptions& options) {
  ApmResult result;
  result.lambda = options.lambda;
  result.zone_indicators = options.zone_indicators;
  result.outcomes = options.outcomes;

  auto ensure_player = [&](const std::string& pid) -> PlayerApm& {
    auto [it, inserted] = result.players.try_emplace(pid);
    if (inserted) {
      it->second.player_id = pid;
      auto pit = data.players.find(pid);
      if (pit != data.players.end()) {
        it->second.position = pit->second.position;
        it->second.team = pit->second.team;
      }
    }
    return it->second;
  };

  // Exposure per player-perspective situation.
  for (const auto& obs : observations) {
    Situation home_sit = obs.situation_for(true);
    Situation away_sit = obs.situation_for(false);
    for (const auto& pid : obs.home_skaters) {
      ensure_player(pid).toi[home_sit] += obs.duration();
    }
    for (const auto& pid : obs.away_skaters) {
      ensure_player(pid).toi[away_sit] += obs.duration();
    }
  }

  for (Situation sit : {Situation::EV, Situation::PP, Situation::SH}) {
    for (OutcomeKind outcome : options.outcomes) {
      DesignOptions dopt;
      dopt.outcome = outcome;
      dopt.zone_indicators = options.zone_indicators;
      dopt.offense_situation = sit;
      ApmDesign design = build_design(observations, dopt);
      if (design.y.size() == 0) continue;
      Eigen::VectorXd beta =
          ridge_solve(design.X, design.y, design.w, design.penalized,
                      options.lambda);

      FitInfo info;
      info.offense_situation = sit;
      info.outcome = outcome;
      info.rows = design.y.size();
      info.intercept = beta(0);
      if (options.zone_indicators) {
        info.zone_offensive = beta(1);
        info.zone_defensive = beta(2);
      }
      result.fits.push_back(info);

      Situation def_sit = mirror(sit);
      for (std::size_t i = 0; i < design.players.size(); ++i) {
        PlayerApm& p = ensure_player(design.players[i]);
        p.off[sit][outcome] = beta(
            static_cast<Eigen::Index>(design.offense_start + i));
        p.def[def_sit][outcome] = beta(
            static_cast<Eigen::Index>(design.defense_start + i));
      }
    }
  }

  for (auto& [pid, p] : result.players) {
    for (OutcomeKind outcome : options.outcomes) {
      double tot_off = 0.0, tot_def = 0.0;
      for (Situation sit : {Situation::EV, Situation::PP, Situation::SH}) {
        auto tit = p.toi.find(sit);
        if (tit == p.toi.end()) continue;
        double hours60 = static_cast<double>(tit->second) / 3600.0;
        auto oit = p.off.find(sit);
        if (oit != p.off.end()) {
          auto v = oit->second.find(outcome);
          if (v != oit->second.end()) tot_off += v->second * hours60;
        }
        auto dit = p.def.find(sit);
        if (dit != p.def.end()) {
          auto v = dit->second.find(outcome);
          if (v != dit->second.end()) tot_def += v->second * hours60;
        }
      }
      p.total_off[outcome] = tot_off;
      p.total_def[outcome] = tot_def;
    }
  }
  return result;
}

Table apm_table(const ApmResult& result, ApmSide side) {
  Table t;
  t.columns = {"Player", "Pos", "Team"};
  t.formats = {ColumnFormat::Text, ColumnFormat::Text, ColumnFormat::Text};
  for (OutcomeKind o : result.outcomes) {
    t.columns.push_back(outcome_letter(o));
    t.formats.push_back(ColumnFormat::Fixed2);
  }
  for (Situation s : {Situation::EV, Situation::PP, Situation::SH}) {
    for (OutcomeKind o : result.outcomes) {
      t.columns.push_back(std::string(outcome_letter(o)) + "_" +
                          situation_name(s) + "60");
      t.formats.push_back(ColumnFormat::Fixed2);
    }
  }

  std::vector<const PlayerApm*> players;
  players.reserve(result.players.size());
  for (const auto& [pid, p] : result.players) players.push_back(&p);
  OutcomeKind primary =
      result.outcomes.empty() ? OutcomeKind::Goals : result.outcomes.front();
  auto total = [&](const PlayerApm* p) {
    const auto& totals =
        side == ApmSide::Offense ? p->total_off : p->total_def;
    auto it = totals.find(primary);
    return it == totals.end() ? 0.0 : it->second;
  };
  std::sort(players.begin(), players.end(),
            [&](const PlayerApm* a, const PlayerApm* b) {
              double ta = total(a), tb = total(b);
              if (ta != tb) return ta > tb;
              return a->player_id < b->player_id;
            });

  for (const PlayerApm* p : players) {
    std::vector<TableValue> row = {p->player_id,
                                   std::string(to_token(p->position)),
                                   p->team};
    const auto& totals = side == ApmSide::Offense ? p->total_off : p->total_def;
    for (OutcomeKind o : result.outcomes) {
      auto it = totals.find(o);
      row.push_back(it == totals.end() ? 0.0 : it->second);
    }
    const auto& rates = side == ApmSide::Offense ? p->off : p->def;
    for (Situation s : {Situation::EV, Situation::PP, Situation::SH}) {
      auto sit_it = rates.find(s);
      for (OutcomeKind o : result.outcomes) {
        double v = 0.0;
        if (sit_it != rates.end()) {
          auto oit = sit_it->second.find(o);
          if (oit != sit_it->second.end()) v = oit->second;
        }
        row.push_back(v);
      }
    }
    t.add_row(std::move(row));
  }
  return t;
}

WowyResult wowy(std::span<const ApmObservation> observations,
                const Dataset& data, const std::string& player,
                OutcomeKind outcome, const WowyScope& scope) {
  auto pit = data.players.find(player);
  if (pit == data.players.end()) {
    throw Error(ErrorCategory::Data, "unknown player: " + player);
  }
  const std::string& team = pit->second.team;

  double on_outcome = 0.0, off_outcome = 0.0;
  Seconds on_seconds = 0, off_seconds = 0;
  for (const auto& obs : observations) {
    const GameInfo& game = data.game(obs.game_id);
    bool home_side;
    if (game.home_team == team) {
      home_side = true;
    } else if (game.away_team == team) {
      home_side = false;
    } else {
      continue;
    }
    if (scope.venue == stats::Venue::AwayOnly && home_side) continue;
    if (!scope.situations.contains(obs.situation_for(home_side))) continue;
    const auto& skaters = home_side ? obs.home_skaters : obs.away_skaters;
    const Outcomes& out = home_side ? obs.home : obs.away;
    bool on = std::binary_search(skaters.begin(), skaters.end(), player);
    if (on) {
      on_outcome += out.get(outcome);
      on_seconds += obs.duration();
    } else {
      off_outcome += out.get(outcome);
      off_seconds += obs.duration();
    }
  }
  if (on_seconds == 0) {
    throw Error(ErrorCategory::Data,
                "player " + player + " has no on-ice time in scope");
  }
  if (off_seconds == 0) {
    throw Error(ErrorCategory::Data,
                "player " + player + " is never off the ice in scope; "
                "off-ice rate undefined");
  }
  WowyResult r;
  r.on_seconds = on_seconds;
  r.off_seconds = off_seconds;
  r.on_rate = on_outcome * 3600.0 / static_cast<double>(on_seconds);
  r.off_rate = off_outcome * 3600.0 / static_cast<double>(off_seconds);
  r.diff = r.on_rate - r.off_rate;
  return r;
}

double cross_validate_lambda(std::span<const ApmObservation> observations,
                             const DesignOptions& options,
                             std::span<const double> grid, int folds) {
  if (grid.empty()) {
    throw Error(ErrorCategory::Usage, "empty lambda grid");
  }
  if (folds < 2) {
    throw Error(ErrorCategory::Usage, "need at least 2 folds");
  }

  // Fold assignment by game so the two direction-rows of one observation
  // never straddle the train/test split.
  std::map<std::string, int> game_fold;
  {
    std::set<std::string> games;
    for (const auto& obs : observations) games.insert(obs.game_id);
    int i = 0;
    for (const auto& g : games) game_fold[g] = i++ % folds;
  }

  ApmDesign full = build_design(observations, options);
  double best_lambda = grid[0];
  double best_err = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    double err = 0.0;
    for (int f = 0; f < folds; ++f) {
      std::vector<int> train_rows, test_rows;
      for (Eigen::Index r = 0; r < full.y.size(); ++r) {
        int fold = game_fold[full.row_game[static_cast<std::size_t>(r)]];
        (fold == f ? test_rows : train_rows).push_back(static_cast<int>(r));
      }
      if (train_rows.empty() || test_rows.empty()) continue;

      Eigen::SparseMatrix<double> Xtr(static_cast<Eigen::Index>(
                                          train_rows.size()),
                                      full.X.cols());
      {
        std::map<int, int> row_map;
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
          row_map[train_rows[i]] = static_cast<int>(i);
        }
        std::vector<Eigen::Triplet<double>> trip;
        for (int k = 0; k < full.X.outerSize(); ++k) {
          for (Eigen::SparseMatrix<double>::InnerIterator it(full.X, k); it;
               ++it) {
            auto rit = row_map.find(static_cast<int>(it.row()));
            if (rit != row_map.end()) {
              trip.emplace_back(rit->second, static_cast<int>(it.col()),
                                it.value());
            }
          }
        }
        Xtr.setFromTriplets(trip.begin(), trip.end());
      }
      Eigen::VectorXd ytr(train_rows.size()), wtr(train_rows.size());
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        ytr(static_cast<Eigen::Index>(i)) = full.y(train_rows[i]);
        wtr(static_cast<Eigen::Index>(i)) = full.w(train_rows[i]);
      }
      Eigen::VectorXd beta =
          ridge_solve(Xtr, ytr, wtr, full.penalized, lambda);

      Eigen::VectorXd pred_all = full.X * beta;
      for (int r : test_rows) {
        double resid = full.y(r) - pred_all(r);
        err += full.w(r) * resid * resid;
      }
    }
    if (err < best_err) {
      best_err = err;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

void write_design(std::ostream& out, const ApmDesign& design) {
  out << kDesignVersionLine << '\n';
  out << "rows " << design.y.size() << " cols " << design.X.cols() << " nnz "
      << design.X.nonZeros() << '\n';
  for (std::size_t c = 0; c < design.col_names.size(); ++c) {
    out << "col " << c << ' ' << design.col_names[c] << ' '
        << (design.penalized[c] ? 1 : 0) << '\n';
  }
  for (Eigen::Index r = 0; r < design.y.size(); ++r) {
    out << "row " << r << ' ' << design.row_game[static_cast<std::size_t>(r)]
        << ' ' << fmt17(design.y(r)) << ' ' << fmt17(design.w(r)) << '\n';
  }
  for (int k = 0; k < design.X.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(design.X, k); it;
         ++it) {
      out << "entry " << it.row() << ' ' << it.col() << ' ' << fmt17(it.value())
          << '\n';
    }
  }
}

}  // namespace puckweight::apm
