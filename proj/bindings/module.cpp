#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numeric>

#include <nlohmann/json.hpp>

#include "puckweight/apm.hpp"
#include "puckweight/errors.hpp"
#include "puckweight/features.hpp"
#include "puckweight/glm.hpp"
#include "puckweight/pipeline.hpp"
#include "puckweight/reliability.hpp"
#include "puckweight/stats.hpp"
#include "puckweight/synth.hpp"

namespace py = pybind11;
namespace pw = puckweight;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null: return py::none();
    case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case nlohmann::json::value_t::number_float:
      return py::float_(j.get<double>());
    case nlohmann::json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it) {
        out[py::str(it.key())] = json_to_py(it.value());
      }
      return out;
    }
    default: return py::none();
  }
}

py::object table_rows(const pw::Table& t) {
  return json_to_py(pw::table_to_json(t));
}

std::set<pw::Strength> strengths_from(const std::vector<std::string>& names) {
  std::set<pw::Strength> out;
  for (const auto& n : names) {
    if (n == "all") {
      return {pw::Strength::EV55, pw::Strength::EV44, pw::Strength::PP54,
              pw::Strength::PP53, pw::Strength::SH45, pw::Strength::SH35};
    }
    auto s = pw::strength_from_token(n);
    if (!s) {
      throw pw::Error(pw::ErrorCategory::Usage, "unknown strength '" + n + "'");
    }
    out.insert(*s);
  }
  if (out.empty()) out.insert(pw::Strength::EV55);
  return out;
}

pw::stats::Venue venue_from(const std::string& v) {
  if (v == "all") return pw::stats::Venue::All;
  if (v == "away") return pw::stats::Venue::AwayOnly;
  throw pw::Error(pw::ErrorCategory::Usage, "venue must be 'all' or 'away'");
}

pw::apm::OutcomeKind outcome_from(const std::string& name) {
  auto o = pw::apm::outcome_from_name(name);
  if (!o) {
    throw pw::Error(pw::ErrorCategory::Usage, "unknown outcome '" + name + "'");
  }
  return *o;
}

pw::ScoredDataset scored_from_files(const std::string& events,
                                    const std::string& shifts,
                                    const pw::glm::FittedModel& model) {
  return pw::score_dataset(pw::load_dataset(events, shifts), model);
}

pw::stats::StatScope scope_from(const std::vector<std::string>& strengths,
                                const std::string& venue,
                                std::int64_t min_shots) {
  pw::stats::StatScope scope;
  scope.strengths = strengths_from(strengths);
  scope.venue = venue_from(venue);
  scope.min_shots = min_shots;
  return scope;
}

}  // namespace

PYBIND11_MODULE(_puckweight, m) {
  m.doc() = "Weighted-shots hockey analytics: shot-quality logistic model, "
            "skater/goalie/team statistics, split-half reliability, and "
            "ridge adjusted plus-minus.";

  py::register_exception<pw::Error>(m, "PuckweightError");

  py::class_<pw::glm::FittedModel>(m, "Model")
      .def_property_readonly("predictors",
                             [](const pw::glm::FittedModel& model) {
                               return model.predictor_names;
                             })
      .def_property_readonly("coefficients",
                             [](const pw::glm::FittedModel& model) {
                               py::dict out;
                               for (std::size_t i = 0;
                                    i < model.predictor_names.size(); ++i) {
                                 out[py::str(model.predictor_names[i])] =
                                     model.coefficients(
                                         static_cast<Eigen::Index>(i));
                               }
                               return out;
                             })
      .def_readonly("n_obs", &pw::glm::FittedModel::n_obs)
      .def_readonly("converged", &pw::glm::FittedModel::converged)
      .def_readonly("iterations", &pw::glm::FittedModel::iterations)
      .def_readonly("log_likelihood", &pw::glm::FittedModel::log_likelihood)
      .def("summary",
           [](const pw::glm::FittedModel& model) {
             return table_rows(pw::glm::summary_table(model));
           })
      .def("save",
           [](const pw::glm::FittedModel& model, const std::string& path) {
             pw::glm::save_model_file(path, model);
           },
           py::arg("path"))
      .def_static("load",
                  [](const std::string& path) {
                    return pw::glm::load_model_file(path);
                  },
                  py::arg("path"));

  m.def(
      "generate_season",
      [](std::uint64_t seed, int games, int teams, int players_per_team,
         double shot_rate, double goalie_skill_sd, double player_effect_sd,
         double defense_spread, const std::string& season,
         const std::string& out_dir) {
        pw::synth::SynthConfig config;
        config.seed = seed;
        config.n_games = games;
        config.teams = teams;
        config.players_per_team = players_per_team;
        config.shot_rate = shot_rate;
        config.goalie_skill_sd = goalie_skill_sd;
        config.player_offense_sd = player_effect_sd;
        config.defense_quality_spread = defense_spread;
        config.season = season;
        auto paths = pw::synth::generate_files(config, out_dir);
        py::dict out;
        out["events"] = paths.events.string();
        out["shifts"] = paths.shifts.string();
        out["truth"] = paths.truth.string();
        return out;
      },
      py::arg("seed"), py::arg("games"), py::arg("teams"),
      py::arg("players_per_team") = 15, py::arg("shot_rate") = 55.0,
      py::arg("goalie_skill_sd") = 0.0, py::arg("player_effect_sd") = 0.0,
      py::arg("defense_spread") = 0.0, py::arg("season") = "2008",
      py::arg("out_dir") = "synth_out",
      "Write a deterministic synthetic season (events, shifts, truth).");

  m.def(
      "validate",
      [](const std::string& events, const std::string& shifts) {
        auto data = pw::load_dataset(events, shifts);
        py::dict out;
        out["games"] = data.games.size();
        out["events"] = data.events.size();
        out["shifts"] = data.shifts.size();
        out["players"] = data.players.size();
        out["eligible_shots"] = data.eligible.size();
        return out;
      },
      py::arg("events"), py::arg("shifts"),
      "Parse and cross-check an events/shifts file pair.");

  m.def(
      "fit",
      [](const std::string& events, const std::string& shifts, int max_iter,
         double tol) {
        auto data = pw::load_dataset(events, shifts);
        pw::glm::IrlsOptions opt;
        opt.max_iter = max_iter;
        opt.tol = tol;
        return pw::fit_on_dataset(data, opt);
      },
      py::arg("events"), py::arg("shifts"), py::arg("max_iter") = 50,
      py::arg("tol") = 1e-8,
      "Fit the shot-quality logistic model on a season's eligible shots.");

  m.def(
      "score",
      [](const std::string& events, const std::string& shifts,
         const pw::glm::FittedModel& model, int top) {
        auto scored = scored_from_files(events, shifts, model);
        std::vector<std::size_t> order(scored.predictions.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) {
                    double pa = scored.predictions[a].probability;
                    double pb = scored.predictions[b].probability;
                    if (pa != pb) return pa > pb;
                    return scored.data.eligible[a].event_idx <
                           scored.data.eligible[b].event_idx;
                  });
        std::size_t limit =
            top > 0 ? std::min<std::size_t>(order.size(),
                                            static_cast<std::size_t>(top))
                    : order.size();
        py::list rows;
        for (std::size_t rank = 0; rank < limit; ++rank) {
          std::size_t i = order[rank];
          const auto& fv = scored.data.eligible[i].fv;
          const auto& e =
              scored.data.events[scored.data.eligible[i].event_idx];
          const auto& pred = scored.predictions[i];
          py::dict row;
          row["rank"] = rank + 1;
          row["game_id"] = e.game_id;
          row["event_index"] = e.event_index;
          row["shooter"] = e.shooter_id;
          row["distance"] = fv.distance;
          row["angle"] = fv.angle;
          row["rebound"] = fv.rebound;
          row["strength"] = pw::to_token(fv.strength);
          row["shot_type"] = pw::to_token(fv.shot_type);
          row["p_goal"] = pred.probability;
          row["err"] = pred.std_error;
          row["event"] = e.kind == pw::EventKind::Goal ? "GOAL" : "SHOT";
          rows.append(std::move(row));
        }
        return rows;
      },
      py::arg("events"), py::arg("shifts"), py::arg("model"),
      py::arg("top") = 0,
      "Score eligible shots and return them ranked by goal probability.");

  m.def(
      "skater_stats",
      [](const std::string& events, const std::string& shifts,
         const pw::glm::FittedModel& model,
         const std::vector<std::string>& strengths, const std::string& venue,
         std::int64_t min_shots) {
        auto scored = scored_from_files(events, shifts, model);
        auto scope = scope_from(strengths, venue, min_shots);
        double league = pw::stats::league_shooting_pct(scored, scope);
        return table_rows(pw::stats::skaters_table(
            pw::stats::skater_stats(scored, scope, league)));
      },
      py::arg("events"), py::arg("shifts"), py::arg("model"),
      py::arg("strengths") = std::vector<std::string>{"EV55"},
      py::arg("venue") = "all", py::arg("min_shots") = std::int64_t{0});

  m.def(
      "goalie_stats",
      [](const std::string& events, const std::string& shifts,
         const pw::glm::FittedModel& model,
         const std::vector<std::string>& strengths, const std::string& venue,
         std::int64_t min_shots) {
        auto scored = scored_from_files(events, shifts, model);
        auto scope = scope_from(strengths, venue, min_shots);
        double league = pw::stats::league_save_pct(scored, scope);
        return table_rows(pw::stats::goalies_table(
            pw::stats::goalie_stats(scored, scope, league)));
      },
      py::arg("events"), py::arg("shifts"), py::arg("model"),
      py::arg("strengths") = std::vector<std::string>{"EV55"},
      py::arg("venue") = "all", py::arg("min_shots") = std::int64_t{0});

  m.def(
      "team_stats",
      [](const std::string& events, const std::string& shifts,
         const pw::glm::FittedModel& model,
         const std::vector<std::string>& strengths, const std::string& venue,
         const std::string& side) {
        auto scored = scored_from_files(events, shifts, model);
        auto scope = scope_from(strengths, venue, 0);
        pw::stats::TeamSide team_side = side == "against"
                                            ? pw::stats::TeamSide::Against
                                            : pw::stats::TeamSide::For;
        return table_rows(pw::stats::teams_table(
            pw::stats::team_stats(scored, scope, team_side)));
      },
      py::arg("events"), py::arg("shifts"), py::arg("model"),
      py::arg("strengths") = std::vector<std::string>{"EV55"},
      py::arg("venue") = "all", py::arg("side") = "for");

  m.def(
      "reliability",
      [](const std::string& events, const std::string& shifts,
         const pw::glm::FittedModel& model, const std::string& entity,
         const std::string& stat, const py::object& target,
         const std::string& venue, std::int64_t min_shots,
         const std::vector<std::string>& strengths) {
        pw::reliability::EntityKind kind;
        if (entity == "skater") {
          kind = pw::reliability::EntityKind::Skater;
        } else if (entity == "goalie") {
          kind = pw::reliability::EntityKind::Goalie;
        } else if (entity == "team") {
          kind = pw::reliability::EntityKind::Team;
        } else {
          throw pw::Error(pw::ErrorCategory::Usage,
                          "entity must be skater, goalie, or team");
        }
        auto scored = scored_from_files(events, shifts, model);
        pw::reliability::SplitSpec spec;
        spec.venue = venue_from(venue);
        spec.min_exposure = min_shots;
        spec.strengths = strengths_from(strengths);
        pw::reliability::CorrelationReport rep =
            target.is_none()
                ? pw::reliability::reliability(scored, kind, stat, spec)
                : pw::reliability::predictive(scored, kind, stat,
                                              target.cast<std::string>(),
                                              spec);
        py::dict out;
        out["stat"] = rep.stat_name;
        out["target"] = rep.target_name;
        out["r"] = rep.r;
        out["n"] = rep.n;
        out["flagged_outliers"] = rep.flagged_outliers;
        return out;
      },
      py::arg("events"), py::arg("shifts"), py::arg("model"),
      py::arg("entity"), py::arg("stat"), py::arg("target") = py::none(),
      py::arg("venue") = "away", py::arg("min_shots") = std::int64_t{0},
      py::arg("strengths") = std::vector<std::string>{"EV55"},
      "Split-half reliability (or odd-vs-even predictive correlation).");

  m.def(
      "apm",
      [](const std::string& events, const std::string& shifts,
         const pw::glm::FittedModel& model,
         const std::vector<std::string>& outcomes, double lam, bool zone,
         const std::string& side) {
        auto scored = scored_from_files(events, shifts, model);
        auto observations = pw::apm::build_observations(scored);
        pw::apm::ApmOptions opt;
        opt.lambda = lam;
        opt.zone_indicators = zone;
        opt.outcomes.clear();
        for (const auto& o : outcomes) opt.outcomes.push_back(outcome_from(o));
        auto result = pw::apm::fit_apm(observations, scored.data, opt);
        return table_rows(pw::apm::apm_table(
            result, side == "defense" ? pw::apm::ApmSide::Defense
                                      : pw::apm::ApmSide::Offense));
      },
      py::arg("events"), py::arg("shifts"), py::arg("model"),
      py::arg("outcomes") = std::vector<std::string>{"goals", "wshots",
                                                     "shots", "fenwick",
                                                     "corsi"},
      py::arg("lam") = 50.0, py::arg("zone") = true,
      py::arg("side") = "offense",
      "Ridge adjusted plus-minus per 60 minutes, by situation and outcome.");

  m.def(
      "wowy",
      [](const std::string& events, const std::string& shifts,
         const pw::glm::FittedModel& model, const std::string& player,
         const std::string& outcome, const std::string& venue) {
        auto scored = scored_from_files(events, shifts, model);
        auto observations = pw::apm::build_observations(scored);
        pw::apm::WowyScope scope;
        scope.venue = venue_from(venue);
        auto r = pw::apm::wowy(observations, scored.data, player,
                               outcome_from(outcome), scope);
        py::dict out;
        out["player"] = player;
        out["outcome"] = outcome;
        out["on_rate"] = r.on_rate;
        out["off_rate"] = r.off_rate;
        out["diff"] = r.diff;
        out["on_seconds"] = r.on_seconds;
        out["off_seconds"] = r.off_seconds;
        return out;
      },
      py::arg("events"), py::arg("shifts"), py::arg("model"),
      py::arg("player"), py::arg("outcome") = "goals",
      py::arg("venue") = "all",
      "Team rate per 60 with the player on vs off the ice.");

  m.def(
      "roc_auc",
      [](const std::vector<double>& scores, const std::vector<int>& labels) {
        auto roc = pw::glm::roc_auc(scores, labels);
        py::list points;
        for (const auto& p : roc.points) {
          points.append(py::make_tuple(p.fpr, p.tpr, p.threshold));
        }
        return py::make_tuple(roc.auc, points);
      },
      py::arg("scores"), py::arg("labels"),
      "ROC curve and trapezoid AUC (ties counted one half).");

  m.def(
      "fit_irls",
      [](const std::vector<std::vector<double>>& rows,
         const std::vector<double>& labels,
         const std::vector<std::string>& names, int max_iter, double tol) {
        if (rows.empty()) {
          throw pw::Error(pw::ErrorCategory::Usage, "empty design");
        }
        Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(rows[0].size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].size() != rows[0].size()) {
            throw pw::Error(pw::ErrorCategory::Usage, "ragged design");
          }
          for (std::size_t j = 0; j < rows[i].size(); ++j) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];
          }
        }
        Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
        for (std::size_t i = 0; i < labels.size(); ++i) {
          y(static_cast<Eigen::Index>(i)) = labels[i];
        }
        pw::glm::IrlsOptions opt;
        opt.max_iter = max_iter;
        opt.tol = tol;
        return pw::glm::fit_irls(X, y, names, opt);
      },
      py::arg("X"), py::arg("y"), py::arg("names"), py::arg("max_iter") = 50,
      py::arg("tol") = 1e-8,
      "Logistic regression on a raw design matrix (column of ones for the "
      "intercept).");

  m.def("default_true_coefficients",
        []() { return pw::synth::default_true_coefficients(); },
        "Ground-truth coefficient defaults used by the season generator.");

  m.attr("__version__") = "0.1.0";
}
