// puckweight: batch analytics over hockey event and shift files.
//
// Exit codes: 0 success, 64 usage, 65 malformed data, 66 missing input,
// 67 schema-version mismatch, 70 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "puckweight/apm.hpp"
#include "puckweight/errors.hpp"
#include "puckweight/features.hpp"
#include "puckweight/glm.hpp"
#include "puckweight/ingest.hpp"
#include "puckweight/pipeline.hpp"
#include "puckweight/reliability.hpp"
#include "puckweight/stats.hpp"
#include "puckweight/synth.hpp"
#include "puckweight/tables.hpp"

namespace pw = puckweight;

namespace {

int exit_code_for(pw::ErrorCategory category) {
  switch (category) {
    case pw::ErrorCategory::Usage: return 64;
    case pw::ErrorCategory::Parse: return 65;
    case pw::ErrorCategory::Data: return 65;
    case pw::ErrorCategory::MissingInput: return 66;
    case pw::ErrorCategory::SchemaVersion: return 67;
    case pw::ErrorCategory::Numeric: return 70;
  }
  return 70;
}

struct OutputOptions {
  std::string out;  // empty = stdout
  std::string format = "table";
};

void emit(const pw::Table& table, const OutputOptions& opts) {
  if (opts.out.empty()) {
    pw::write_table(std::cout, table, opts.format);
    return;
  }
  std::ofstream f(opts.out, std::ios::binary);
  if (!f) {
    throw pw::Error(pw::ErrorCategory::Data, "cannot write " + opts.out);
  }
  pw::write_table(f, table, opts.format);
}

std::set<pw::Strength> parse_strengths(const std::string& csv) {
  std::set<pw::Strength> out;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    if (tok == "all") {
      return {pw::Strength::EV55, pw::Strength::EV44, pw::Strength::PP54,
              pw::Strength::PP53, pw::Strength::SH45, pw::Strength::SH35};
    }
    auto s = pw::strength_from_token(tok);
    if (!s) {
      throw pw::Error(pw::ErrorCategory::Usage,
                      "unknown strength '" + tok + "'");
    }
    out.insert(*s);
  }
  if (out.empty()) {
    throw pw::Error(pw::ErrorCategory::Usage, "empty strength list");
  }
  return out;
}

pw::stats::Venue parse_venue(const std::string& v) {
  if (v == "all") return pw::stats::Venue::All;
  if (v == "away") return pw::stats::Venue::AwayOnly;
  throw pw::Error(pw::ErrorCategory::Usage,
                  "venue must be 'all' or 'away', got '" + v + "'");
}

std::vector<pw::apm::OutcomeKind> parse_outcomes(const std::string& csv) {
  std::vector<pw::apm::OutcomeKind> out;
  std::istringstream in(csv);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    auto o = pw::apm::outcome_from_name(tok);
    if (!o) {
      throw pw::Error(pw::ErrorCategory::Usage,
                      "unknown outcome '" + tok +
                          "' (goals, wshots, shots, fenwick, corsi)");
    }
    out.push_back(*o);
  }
  if (out.empty()) {
    throw pw::Error(pw::ErrorCategory::Usage, "empty outcome list");
  }
  return out;
}

void log_config(const std::string& cmd,
                const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ostringstream line;
  line << "# config: cmd=" << cmd;
  for (const auto& [k, v] : kv) line << ' ' << k << '=' << v;
  std::cerr << line.str() << '\n';
}

pw::ScoredDataset load_scored(const std::string& model_path,
                              const std::string& events,
                              const std::string& shifts) {
  auto model = pw::glm::load_model_file(model_path);
  auto data = pw::load_dataset(events, shifts);
  return pw::score_dataset(std::move(data), std::move(model));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"puckweight: weighted-shots hockey analytics"};
  app.set_config("--config", "", "flat key=value option file", false);
  app.require_subcommand(1);

  std::function<int()> action;

  // ----- validate ---------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("validate",
                                   "parse and cross-check events and shifts");
    auto events = std::make_shared<std::string>();
    auto shifts = std::make_shared<std::string>();
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--events", *events, "events file")->required();
    cmd->add_option("--shifts", *shifts, "shifts file")->required();
    cmd->add_option("--out", out->out, "write the report here");
    cmd->add_option("--format", out->format, "table or json");
    cmd->callback([=, &action]() {
      action = [=]() {
        log_config("validate", {{"events", *events}, {"shifts", *shifts}});
        auto data = pw::load_dataset(*events, *shifts);
        std::map<std::string, std::int64_t> kinds;
        for (const auto& e : data.events) kinds[pw::to_token(e.kind)] += 1;
        pw::Table t;
        t.columns = {"Metric", "Value"};
        t.formats = {pw::ColumnFormat::Text, pw::ColumnFormat::Integer};
        t.add_row({std::string("games"),
                   static_cast<std::int64_t>(data.games.size())});
        t.add_row({std::string("events"),
                   static_cast<std::int64_t>(data.events.size())});
        t.add_row({std::string("shifts"),
                   static_cast<std::int64_t>(data.shifts.size())});
        t.add_row({std::string("players"),
                   static_cast<std::int64_t>(data.players.size())});
        t.add_row({std::string("eligible_shots"),
                   static_cast<std::int64_t>(data.eligible.size())});
        for (const auto& [k, n] : kinds) t.add_row({"kind_" + k, n});
        emit(t, *out);
        return 0;
      };
    });
  }

  // ----- fit ---------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("fit", "fit the shot-quality model");
    auto events = std::make_shared<std::string>();
    auto shifts = std::make_shared<std::string>();
    auto model_out = std::make_shared<std::string>();
    auto features_out = std::make_shared<std::string>();
    auto out = std::make_shared<OutputOptions>();
    auto max_iter = std::make_shared<int>(50);
    auto tol = std::make_shared<double>(1e-8);
    cmd->add_option("--events", *events, "events file")->required();
    cmd->add_option("--shifts", *shifts, "shifts file")->required();
    cmd->add_option("--out", *model_out, "model file to write")->required();
    cmd->add_option("--summary", out->out,
                    "write the coefficient table here (default stdout)");
    cmd->add_option("--features-out", *features_out,
                    "also export the expanded feature matrix");
    cmd->add_option("--format", out->format, "table or json");
    cmd->add_option("--max-iter", *max_iter, "IRLS iteration cap");
    cmd->add_option("--tol", *tol, "coefficient-change tolerance");
    cmd->callback([=, &action]() {
      action = [=]() {
        log_config("fit", {{"events", *events},
                           {"shifts", *shifts},
                           {"out", *model_out}});
        auto data = pw::load_dataset(*events, *shifts);
        if (!features_out->empty()) {
          std::vector<pw::features::FeatureVector> rows;
          rows.reserve(data.eligible.size());
          for (const auto& s : data.eligible) rows.push_back(s.fv);
          std::ofstream f(*features_out, std::ios::binary);
          if (!f) {
            throw pw::Error(pw::ErrorCategory::Data,
                            "cannot write " + *features_out);
          }
          pw::features::write_feature_matrix(f, rows);
        }
        pw::glm::IrlsOptions opt;
        opt.max_iter = *max_iter;
        opt.tol = *tol;
        auto model = pw::fit_on_dataset(data, opt);
        pw::glm::save_model_file(*model_out, model);
        emit(pw::glm::summary_table(model), *out);
        return 0;
      };
    });
  }

  // ----- score -------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand("score",
                                   "rank shots by estimated goal probability");
    auto events = std::make_shared<std::string>();
    auto shifts = std::make_shared<std::string>();
    auto model = std::make_shared<std::string>();
    auto top = std::make_shared<int>(5);
    auto out = std::make_shared<OutputOptions>();
    cmd->add_option("--events", *events, "events file")->required();
    cmd->add_option("--shifts", *shifts, "shifts file")->required();
    cmd->add_option("--model", *model, "model file")->required();
    cmd->add_option("--top", *top, "rows to emit (0 = all)");
    cmd->add_option("--out", out->out, "output path");
    cmd->add_option("--format", out->format, "table or json");
    cmd->callback([=, &action]() {
      action = [=]() {
        log_config("score", {{"events", *events},
                             {"shifts", *shifts},
                             {"model", *model},
                             {"top", std::to_string(*top)}});
        auto scored = load_scored(*model, *events, *shifts);
        std::vector<std::size_t> order(scored.predictions.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) {
                    double pa = scored.predictions[a].probability;
                    double pb = scored.predictions[b].probability;
                    if (pa != pb) return pa > pb;
                    const auto& ea =
                        scored.data.events[scored.data.eligible[a].event_idx];
                    const auto& eb =
                        scored.data.events[scored.data.eligible[b].event_idx];
                    if (ea.game_id != eb.game_id) {
                      return ea.game_id < eb.game_id;
                    }
                    return ea.event_index < eb.event_index;
                  });
        pw::Table t;
        t.columns = {"Rank", "Dist",     "Angle", "Reb",     "Change",
                     "Left", "Right",    "Strength", "Type", "P(Goal)",
                     "Err",  "Event"};
        t.formats = {pw::ColumnFormat::Integer, pw::ColumnFormat::General,
                     pw::ColumnFormat::General, pw::ColumnFormat::Integer,
                     pw::ColumnFormat::General, pw::ColumnFormat::General,
                     pw::ColumnFormat::General, pw::ColumnFormat::Text,
                     pw::ColumnFormat::Text,    pw::ColumnFormat::Fixed3,
                     pw::ColumnFormat::Fixed3,  pw::ColumnFormat::Text};
        std::size_t limit =
            *top > 0 ? std::min<std::size_t>(order.size(),
                                             static_cast<std::size_t>(*top))
                     : order.size();
        for (std::size_t rank = 0; rank < limit; ++rank) {
          std::size_t i = order[rank];
          const auto& fv = scored.data.eligible[i].fv;
          const auto& e =
              scored.data.events[scored.data.eligible[i].event_idx];
          const auto& pred = scored.predictions[i];
          t.add_row({static_cast<std::int64_t>(rank + 1), fv.distance,
                     fv.angle, static_cast<std::int64_t>(fv.rebound),
                     fv.angle_change_left + fv.angle_change_right,
                     fv.angle_change_left, fv.angle_change_right,
                     std::string(pw::to_token(fv.strength)),
                     std::string(pw::to_token(fv.shot_type)),
                     pred.probability, pred.std_error,
                     std::string(e.kind == pw::EventKind::Goal ? "GOAL"
                                                               : "SHOT")});
        }
        emit(t, *out);
        return 0;
      };
    });
  }

  // ----- skaters / goalies / teams ----------------------------------------
  struct StatArgs {
    std::string events, shifts, model;
    std::string strengths = "EV55";
    std::string venue = "all";
    std::int64_t min_shots = 0;
    std::string side = "for";
    OutputOptions out;
  };
  auto add_stat_options = [](CLI::App* cmd, const std::shared_ptr<StatArgs>& a,
                             bool with_side) {
    cmd->add_option("--events", a->events, "events file")->required();
    cmd->add_option("--shifts", a->shifts, "shifts file")->required();
    cmd->add_option("--model", a->model, "model file")->required();
    cmd->add_option("--strengths", a->strengths,
                    "comma list of EV55,EV44,PP54,PP53,SH45,SH35 or 'all'");
    cmd->add_option("--venue", a->venue, "all or away");
    cmd->add_option("--min-shots", a->min_shots, "minimum shots per line");
    if (with_side) cmd->add_option("--side", a->side, "for or against");
    cmd->add_option("--out", a->out.out, "output path");
    cmd->add_option("--format", a->out.format, "table or json");
  };
  auto scope_of = [](const StatArgs& a) {
    pw::stats::StatScope scope;
    scope.strengths = parse_strengths(a.strengths);
    scope.venue = parse_venue(a.venue);
    scope.min_shots = a.min_shots;
    return scope;
  };

  {
    auto* cmd = app.add_subcommand("skaters", "skater weighted-shot lines");
    auto a = std::make_shared<StatArgs>();
    add_stat_options(cmd, a, false);
    cmd->callback([=, &action]() {
      action = [=]() {
        log_config("skaters", {{"events", a->events},
                               {"strengths", a->strengths},
                               {"venue", a->venue}});
        auto scored = load_scored(a->model, a->events, a->shifts);
        auto scope = scope_of(*a);
        double league = pw::stats::league_shooting_pct(scored, scope);
        emit(pw::stats::skaters_table(
                 pw::stats::skater_stats(scored, scope, league)),
             a->out);
        return 0;
      };
    });
  }
  {
    auto* cmd = app.add_subcommand("goalies", "goalie weighted-shot lines");
    auto a = std::make_shared<StatArgs>();
    add_stat_options(cmd, a, false);
    cmd->callback([=, &action]() {
      action = [=]() {
        log_config("goalies", {{"events", a->events},
                               {"strengths", a->strengths},
                               {"venue", a->venue}});
        auto scored = load_scored(a->model, a->events, a->shifts);
        auto scope = scope_of(*a);
        double league = pw::stats::league_save_pct(scored, scope);
        emit(pw::stats::goalies_table(
                 pw::stats::goalie_stats(scored, scope, league)),
             a->out);
        return 0;
      };
    });
  }
  {
    auto* cmd = app.add_subcommand("teams", "team rate and percentage lines");
    auto a = std::make_shared<StatArgs>();
    add_stat_options(cmd, a, true);
    cmd->callback([=, &action]() {
      action = [=]() {
        log_config("teams", {{"events", a->events},
                             {"side", a->side},
                             {"venue", a->venue}});
        auto scored = load_scored(a->model, a->events, a->shifts);
        auto scope = scope_of(*a);
        pw::stats::TeamSide side;
        if (a->side == "for") {
          side = pw::stats::TeamSide::For;
        } else if (a->side == "against") {
          side = pw::stats::TeamSide::Against;
        } else {
          throw pw::Error(pw::ErrorCategory::Usage,
                          "side must be 'for' or 'against'");
        }
        emit(pw::stats::teams_table(
                 pw::stats::team_stats(scored, scope, side)),
             a->out);
        return 0;
      };
    });
  }

  // ----- reliability -------------------------------------------------------
  {
    auto* cmd = app.add_subcommand(
        "reliability", "split-half reliability and predictive correlations");
    auto a = std::make_shared<StatArgs>();
    auto entity = std::make_shared<std::string>("goalie");
    auto stat_list = std::make_shared<std::string>();
    auto target = std::make_shared<std::string>();
    auto min_exposure = std::make_shared<std::int64_t>(0);
    auto plot_data = std::make_shared<std::string>();
    a->venue = "away";
    cmd->add_option("--events", a->events, "events file")->required();
    cmd->add_option("--shifts", a->shifts, "shifts file")->required();
    cmd->add_option("--model", a->model, "model file")->required();
    cmd->add_option("--entity", *entity, "skater, goalie, or team");
    cmd->add_option("--stat", *stat_list, "comma list of statistics")
        ->required();
    cmd->add_option("--target", *target,
                    "even-half target statistic (default: the stat itself)");
    cmd->add_option("--strengths", a->strengths, "strength scope");
    cmd->add_option("--venue", a->venue, "all or away (default away)");
    cmd->add_option("--min-shots", *min_exposure,
                    "minimum in-scope shots per half");
    cmd->add_option("--plot-data", *plot_data,
                    "also write bar-chart rows (stat_name,r) here");
    cmd->add_option("--out", a->out.out, "output path");
    cmd->add_option("--format", a->out.format, "table or json");
    cmd->callback([=, &action]() {
      action = [=]() {
        log_config("reliability",
                   {{"entity", *entity},
                    {"stat", *stat_list},
                    {"venue", a->venue},
                    {"min_shots", std::to_string(*min_exposure)}});
        pw::reliability::EntityKind kind;
        if (*entity == "skater") {
          kind = pw::reliability::EntityKind::Skater;
        } else if (*entity == "goalie") {
          kind = pw::reliability::EntityKind::Goalie;
        } else if (*entity == "team") {
          kind = pw::reliability::EntityKind::Team;
        } else {
          throw pw::Error(pw::ErrorCategory::Usage,
                          "entity must be skater, goalie, or team");
        }
        auto scored = load_scored(a->model, a->events, a->shifts);
        pw::reliability::SplitSpec spec;
        spec.venue = parse_venue(a->venue);
        spec.min_exposure = *min_exposure;
        spec.strengths = parse_strengths(a->strengths);

        std::vector<pw::reliability::CorrelationReport> reports;
        std::istringstream in(*stat_list);
        std::string stat;
        while (std::getline(in, stat, ',')) {
          if (stat.empty()) continue;
          if (target->empty()) {
            reports.push_back(
                pw::reliability::reliability(scored, kind, stat, spec));
          } else {
            reports.push_back(pw::reliability::predictive(scored, kind, stat,
                                                          *target, spec));
          }
        }
        emit(pw::reliability::report_table(reports), a->out);
        if (!plot_data->empty()) {
          std::ofstream f(*plot_data, std::ios::binary);
          if (!f) {
            throw pw::Error(pw::ErrorCategory::Data,
                            "cannot write " + *plot_data);
          }
          pw::reliability::write_plot_data(f, reports);
        }
        return 0;
      };
    });
  }

  // ----- apm ----------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand(
        "apm", "ridge-regression adjusted plus-minus per 60 minutes");
    auto a = std::make_shared<StatArgs>();
    auto outcomes =
        std::make_shared<std::string>("goals,wshots,shots,fenwick,corsi");
    auto lambda = std::make_shared<double>(50.0);
    auto cv_folds = std::make_shared<int>(0);
    auto grid_csv = std::make_shared<std::string>("1,10,50,100,500,1000");
    auto no_zone = std::make_shared<bool>(false);
    auto side = std::make_shared<std::string>("offense");
    auto dump_design = std::make_shared<std::string>();
    cmd->add_option("--events", a->events, "events file")->required();
    cmd->add_option("--shifts", a->shifts, "shifts file")->required();
    cmd->add_option("--model", a->model, "model file")->required();
    cmd->add_option("--outcomes", *outcomes, "comma list of outcomes");
    cmd->add_option("--lambda", *lambda, "ridge penalty");
    cmd->add_option("--cv-folds", *cv_folds,
                    "choose lambda by k-fold CV over games (0 = off)");
    cmd->add_option("--lambda-grid", *grid_csv, "CV lambda grid");
    cmd->add_flag("--no-zone", *no_zone, "drop zone-start indicators");
    cmd->add_option("--side", *side, "offense or defense table");
    cmd->add_option("--dump-design", *dump_design,
                    "write the sparse design in coordinate text form");
    cmd->add_option("--out", a->out.out, "output path");
    cmd->add_option("--format", a->out.format, "table or json");
    cmd->callback([=, &action]() {
      action = [=]() {
        log_config("apm", {{"outcomes", *outcomes},
                           {"lambda", std::to_string(*lambda)},
                           {"cv_folds", std::to_string(*cv_folds)}});
        auto scored = load_scored(a->model, a->events, a->shifts);
        auto observations = pw::apm::build_observations(scored);

        pw::apm::ApmOptions opt;
        opt.outcomes = parse_outcomes(*outcomes);
        opt.zone_indicators = !*no_zone;
        opt.lambda = *lambda;
        if (*cv_folds > 0) {
          std::vector<double> grid;
          std::istringstream in(*grid_csv);
          std::string tok;
          while (std::getline(in, tok, ',')) {
            if (!tok.empty()) grid.push_back(std::stod(tok));
          }
          pw::apm::DesignOptions dopt;
          dopt.outcome = opt.outcomes.front();
          dopt.zone_indicators = opt.zone_indicators;
          opt.lambda = pw::apm::cross_validate_lambda(observations, dopt,
                                                      grid, *cv_folds);
          std::cerr << "# cv: lambda=" << opt.lambda << '\n';
        }
        if (!dump_design->empty()) {
          pw::apm::DesignOptions dopt;
          dopt.outcome = opt.outcomes.front();
          dopt.zone_indicators = opt.zone_indicators;
          auto design = pw::apm::build_design(observations, dopt);
          std::ofstream f(*dump_design, std::ios::binary);
          if (!f) {
            throw pw::Error(pw::ErrorCategory::Data,
                            "cannot write " + *dump_design);
          }
          pw::apm::write_design(f, design);
        }
        auto result = pw::apm::fit_apm(observations, scored.data, opt);
        pw::apm::ApmSide table_side;
        if (*side == "offense") {
          table_side = pw::apm::ApmSide::Offense;
        } else if (*side == "defense") {
          table_side = pw::apm::ApmSide::Defense;
        } else {
          throw pw::Error(pw::ErrorCategory::Usage,
                          "side must be offense or defense");
        }
        emit(pw::apm::apm_table(result, table_side), a->out);
        return 0;
      };
    });
  }

  // ----- wowy ---------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand(
        "wowy", "team rate with and without a player on the ice");
    auto a = std::make_shared<StatArgs>();
    auto player = std::make_shared<std::string>();
    auto outcome = std::make_shared<std::string>("goals");
    auto situations = std::make_shared<std::string>("EV,PP,SH");
    cmd->add_option("--events", a->events, "events file")->required();
    cmd->add_option("--shifts", a->shifts, "shifts file")->required();
    cmd->add_option("--model", a->model, "model file")->required();
    cmd->add_option("--player", *player, "player id")->required();
    cmd->add_option("--outcome", *outcome, "goals, wshots, shots, ...");
    cmd->add_option("--situations", *situations, "comma list of EV,PP,SH");
    cmd->add_option("--venue", a->venue, "all or away");
    cmd->add_option("--out", a->out.out, "output path");
    cmd->add_option("--format", a->out.format, "table or json");
    cmd->callback([=, &action]() {
      action = [=]() {
        log_config("wowy", {{"player", *player}, {"outcome", *outcome}});
        auto scored = load_scored(a->model, a->events, a->shifts);
        auto observations = pw::apm::build_observations(scored);
        auto kind = pw::apm::outcome_from_name(*outcome);
        if (!kind) {
          throw pw::Error(pw::ErrorCategory::Usage,
                          "unknown outcome '" + *outcome + "'");
        }
        pw::apm::WowyScope scope;
        scope.venue = parse_venue(a->venue);
        scope.situations.clear();
        std::istringstream in(*situations);
        std::string tok;
        while (std::getline(in, tok, ',')) {
          if (tok == "EV") {
            scope.situations.insert(pw::apm::Situation::EV);
          } else if (tok == "PP") {
            scope.situations.insert(pw::apm::Situation::PP);
          } else if (tok == "SH") {
            scope.situations.insert(pw::apm::Situation::SH);
          } else if (!tok.empty()) {
            throw pw::Error(pw::ErrorCategory::Usage,
                            "unknown situation '" + tok + "'");
          }
        }
        auto r = pw::apm::wowy(observations, scored.data, *player, *kind,
                               scope);
        pw::Table t;
        t.columns = {"Player",    "Outcome",   "OnRate60", "OffRate60",
                     "Diff60",    "OnSeconds", "OffSeconds"};
        t.formats = {pw::ColumnFormat::Text,    pw::ColumnFormat::Text,
                     pw::ColumnFormat::Fixed2,  pw::ColumnFormat::Fixed2,
                     pw::ColumnFormat::Fixed2,  pw::ColumnFormat::Integer,
                     pw::ColumnFormat::Integer};
        t.add_row({*player, std::string(pw::apm::outcome_name(*kind)),
                   r.on_rate, r.off_rate, r.diff,
                   static_cast<std::int64_t>(r.on_seconds),
                   static_cast<std::int64_t>(r.off_seconds)});
        emit(t, a->out);
        return 0;
      };
    });
  }

  // ----- synth ---------------------------------------------------------------
  {
    auto* cmd = app.add_subcommand(
        "synth", "generate a deterministic synthetic season");
    auto config = std::make_shared<pw::synth::SynthConfig>();
    auto out_dir = std::make_shared<std::string>("synth_out");
    cmd->add_option("--seed", config->seed, "RNG seed");
    cmd->add_option("--games", config->n_games, "number of games");
    cmd->add_option("--teams", config->teams, "number of teams");
    cmd->add_option("--players-per-team", config->players_per_team,
                    "skaters per roster");
    cmd->add_option("--shot-rate", config->shot_rate,
                    "on-goal attempts per team per game");
    cmd->add_option("--goalie-skill-sd", config->goalie_skill_sd,
                    "sd of goalie logit offsets");
    cmd->add_option("--player-effect-sd", config->player_offense_sd,
                    "sd of per-player shot-rate offsets");
    cmd->add_option("--defense-spread", config->defense_quality_spread,
                    "half-width of per-team shot-distance shifts (feet)");
    cmd->add_option("--rebound-prob", config->rebound_prob,
                    "rebound spawn probability");
    cmd->add_option("--season", config->season, "season label");
    cmd->add_option("--out-dir", *out_dir, "output directory");
    cmd->callback([=, &action]() {
      action = [=]() {
        log_config("synth", {{"seed", std::to_string(config->seed)},
                             {"games", std::to_string(config->n_games)},
                             {"teams", std::to_string(config->teams)},
                             {"out_dir", *out_dir}});
        auto paths = pw::synth::generate_files(*config, *out_dir);
        std::cout << paths.events.string() << '\n'
                  << paths.shifts.string() << '\n'
                  << paths.truth.string() << '\n';
        return 0;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: category=usage code=64: " << e.what() << '\n';
    return 64;
  }

  try {
    return action ? action() : 64;
  } catch (const pw::Error& e) {
    int code = exit_code_for(e.category());
    std::cerr << "error: category=" << pw::category_name(e.category())
              << " code=" << code << ": " << e.what() << '\n';
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: category=internal code=70: " << e.what() << '\n';
    return 70;
  }
}
