#include "puckweight/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "puckweight/errors.hpp"
#include "puckweight/features.hpp"
#include "puckweight/glm.hpp"
#include "puckweight/ingest.hpp"
#include "puckweight/rng.hpp"

namespace puckweight::synth {

namespace {

constexpr Seconds kGameSeconds = 3600;
constexpr Seconds kPeriodSeconds = 1200;
constexpr double kDegToRad = 0.017453292519943295;

struct Roster {
  std::string team;
  std::vector<std::string> skaters;  // index i: slot pool i % 5
  std::vector<PlayerPosition> positions;
  std::string goalie;
};

std::string team_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "T%02d", i + 1);
  return buf;
}

Roster make_roster(int team_idx, int players_per_team) {
  Roster r;
  r.team = team_name(team_idx);
  for (int i = 0; i < players_per_team; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%sS%02d", r.team.c_str(), i + 1);
    r.skaters.push_back(buf);
    // Slot pools 0..2 are forwards, 3..4 defensemen.
    r.positions.push_back(i % 5 < 3 ? PlayerPosition::Forward
                                    : PlayerPosition::Defenseman);
  }
  r.goalie = r.team + "G1";
  return r;
}

// Round-robin schedule (circle method), repeated until n_games are filled.
std::vector<std::pair<int, int>> make_schedule(int teams, int n_games) {
  std::vector<std::pair<int, int>> games;
  std::vector<int> order(static_cast<std::size_t>(teams));
  std::iota(order.begin(), order.end(), 0);
  bool odd = teams % 2 != 0;
  if (odd) order.push_back(-1);  // bye
  int n = static_cast<int>(order.size());
  int round = 0;
  while (static_cast<int>(games.size()) < n_games) {
    for (int i = 0; i < n / 2 && static_cast<int>(games.size()) < n_games;
         ++i) {
      int a = order[static_cast<std::size_t>(i)];
      int b = order[static_cast<std::size_t>(n - 1 - i)];
      if (a < 0 || b < 0) continue;
      if ((round + i) % 2 == 0) {
        games.emplace_back(a, b);
      } else {
        games.emplace_back(b, a);
      }
    }
    std::rotate(order.begin() + 1, order.end() - 1, order.end());
    ++round;
  }
  return games;
}

// Per-team skater-count step function for one game: a handful of two-minute
// penalties, count 5 minus concurrently active ones (floor 3).
std::vector<std::pair<Seconds, int>> count_segments(Rng& rng) {
  std::vector<std::pair<Seconds, int>> deltas;  // (time, +/-1)
  int penalties = 2 + static_cast<int>(rng.below(4));  // 2..5
  for (int i = 0; i < penalties; ++i) {
    Seconds start = static_cast<Seconds>(rng.below(kGameSeconds - 200));
    Seconds period_end = ((start / kPeriodSeconds) + 1) * kPeriodSeconds;
    Seconds end = std::min({start + 120, period_end, kGameSeconds});
    if (end <= start) continue;
    deltas.emplace_back(start, 1);
    deltas.emplace_back(end, -1);
  }
  std::sort(deltas.begin(), deltas.end());
  std::vector<std::pair<Seconds, int>> segments;  // (start, skater count)
  int active = 0;
  segments.emplace_back(0, 5);
  for (const auto& [t, d] : deltas) {
    active += d;
    int count = std::max(3, 5 - active);
    if (segments.back().first == t) {
      segments.back().second = count;
    } else {
      segments.emplace_back(t, count);
    }
  }
  return segments;
}

struct Skeleton {
  Seconds t = 0;
  int seq = 0;
  EventKind kind = EventKind::ShotOnGoal;
  bool on_goal_candidate = false;
  std::string team;
  std::string shooter;
  std::optional<double> x, y;
  std::optional<ShotType> shot_type;
  ZoneKind zone = ZoneKind::Offensive;
  bool goalie_on_ice = true;
  std::string goalie_id;
};

ShotType draw_shot_type(Rng& rng, bool rebound) {
  static const std::vector<double> base = {0.02, 0.45, 0.20, 0.10, 0.15, 0.08};
  static const std::vector<double> reb = {0.0, 0.40, 0.10, 0.20, 0.15, 0.15};
  static const ShotType kinds[6] = {ShotType::WrapAround, ShotType::Wrist,
                                    ShotType::Slap,       ShotType::Backhand,
                                    ShotType::Snap,       ShotType::TipIn};
  return kinds[rng.weighted(rebound ? reb : base)];
}

// Shot location from a distance/angle draw; the angle re-rolls until the
// lateral offset fits on the rink.
std::pair<double, double> draw_location(Rng& rng, double dist) {
  double angle = rng.uniform(0.0, 90.0);
  for (int tries = 0; tries < 20 && dist * std::sin(angle * kDegToRad) > 42.0;
       ++tries) {
    angle = rng.uniform(0.0, 90.0);
  }
  if (dist * std::sin(angle * kDegToRad) > 42.0) {
    angle = std::asin(42.0 / dist) / kDegToRad;
  }
  double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
  double x = features::kGoalX - dist * std::cos(angle * kDegToRad);
  double y = side * dist * std::sin(angle * kDegToRad);
  return {x, y};
}

}  // namespace

const std::map<std::string, double>& default_true_coefficients() {
  static const std::map<std::string, double> defaults = {
      {"(Intercept)", -1.333},
      {"own_rebound", -0.531},
      {"rebound", 0.547},
      {"distance", -0.054},
      {"angle", -0.017},
      {"type_backhand", 0.687},
      {"type_slap", 1.411},
      {"type_snap", 1.135},
      {"type_tip_in", 0.803},
      {"type_wrist", 0.954},
      {"str_ev44", -0.328},
      {"str_pp54", 0.362},
      {"str_pp53", 0.929},
      {"str_sh45", 0.189},
      {"str_sh35", 1.277},
      {"angle_change_left", 0.013},
      {"angle_change_right", 0.014},
      {"shooter_fatigue", -0.025},
      {"off_toi", 0.022},
      {"def_toi", 0.001},
      {"score_diff", 0.031},
      {"by_home", -0.024},
      {"reb_x_angle", 0.005},
      {"own_x_angle", 0.007},
      {"tip_x_angle", 0.014},
  };
  return defaults;
}

SynthResult generate(const SynthConfig& config) {
  if (config.shot_rate <= 0) {
    throw Error(ErrorCategory::Usage, "shot_rate must be > 0");
  }
  if (config.teams < 2) {
    throw Error(ErrorCategory::Usage, "need at least 2 teams");
  }
  if (config.players_per_team < 10) {
    throw Error(ErrorCategory::Usage, "need at least 10 skaters per team");
  }

  const std::map<std::string, double>& coefs =
      config.true_coefficients.empty() ? default_true_coefficients()
                                       : config.true_coefficients;
  {
    const auto& known = features::predictor_names();
    for (const auto& [name, v] : coefs) {
      if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw Error(ErrorCategory::Usage,
                    "unknown coefficient name in config: " + name);
      }
    }
  }

  SynthResult result;
  result.truth.coefficients = coefs;

  std::vector<Roster> rosters;
  for (int t = 0; t < config.teams; ++t) {
    rosters.push_back(make_roster(t, config.players_per_team));
  }

  // Latents, drawn in a fixed order before any game.
  Rng latent_rng(SplitMix64::child_seed(config.seed, 0));
  for (const auto& r : rosters) {
    result.truth.team_defense_shift[r.team] =
        latent_rng.uniform(-config.defense_quality_spread,
                           config.defense_quality_spread);
    result.truth.goalie_skill[r.goalie] =
        latent_rng.normal(0.0, 1.0) * config.goalie_skill_sd;
    for (const auto& pid : r.skaters) {
      result.truth.player_effect[pid] =
          latent_rng.normal(0.0, 1.0) * config.player_offense_sd;
    }
  }

  auto schedule = make_schedule(config.teams, config.n_games);

  for (std::size_t g = 0; g < schedule.size(); ++g) {
    Rng rng(SplitMix64::child_seed(config.seed, g + 1));
    char gid_buf[16];
    std::snprintf(gid_buf, sizeof(gid_buf), "G%05zu", g + 1);
    std::string gid = gid_buf;
    const Roster& home = rosters[static_cast<std::size_t>(schedule[g].first)];
    const Roster& away = rosters[static_cast<std::size_t>(schedule[g].second)];

    // --- shifts ---------------------------------------------------------
    std::vector<ShiftRecord> game_shifts;
    auto build_team_shifts = [&](const Roster& roster,
                                 const std::vector<std::pair<Seconds, int>>&
                                     segments) {
      // Five slots with disjoint player pools; each slot rotates on its own
      // cadence, so on-ice times differ across the five skaters.
      std::vector<std::size_t> rotation(5, 0);
      for (std::size_t seg = 0; seg < segments.size(); ++seg) {
        Seconds seg_start = segments[seg].first;
        Seconds seg_end = seg + 1 < segments.size() ? segments[seg + 1].first
                                                    : kGameSeconds;
        int count = segments[seg].second;
        // Stints end at period boundaries along with the segment.
        for (Seconds ps = seg_start; ps < seg_end;) {
          Seconds pe = std::min(((ps / kPeriodSeconds) + 1) * kPeriodSeconds,
                                seg_end);
          for (int slot = 0; slot < count; ++slot) {
            Seconds t = ps;
            while (t < pe) {
              Seconds len = 30 + static_cast<Seconds>(rng.below(41));
              Seconds end = std::min(t + len, pe);
              std::size_t pool_count = 0;
              for (std::size_t i = static_cast<std::size_t>(slot);
                   i < roster.skaters.size(); i += 5) {
                ++pool_count;
              }
              std::size_t pick =
                  static_cast<std::size_t>(slot) +
                  5 * (rotation[static_cast<std::size_t>(slot)] % pool_count);
              rotation[static_cast<std::size_t>(slot)] += 1;
              game_shifts.push_back({gid, roster.skaters[pick], roster.team,
                                     roster.positions[pick], t, end});
              t = end;
            }
          }
          ps = pe;
        }
      }
      game_shifts.push_back({gid, roster.goalie, roster.team,
                             PlayerPosition::Goalie, 0, kGameSeconds});
    };
    auto home_segments = count_segments(rng);
    auto away_segments = count_segments(rng);
    build_team_shifts(home, home_segments);
    build_team_shifts(away, away_segments);

    auto on_ice = [&](const Roster& roster, Seconds t) {
      std::vector<std::size_t> idx;
      for (const auto& s : game_shifts) {
        if (s.team != roster.team ||
            s.position == PlayerPosition::Goalie) {
          continue;
        }
        if (s.start_seconds <= t && t < s.end_seconds) {
          for (std::size_t i = 0; i < roster.skaters.size(); ++i) {
            if (roster.skaters[i] == s.player_id) {
              idx.push_back(i);
              break;
            }
          }
        }
      }
      return idx;
    };

    // --- event skeletons --------------------------------------------------
    std::vector<Skeleton> skeletons;
    int seq = 0;
    auto push_faceoff = [&](Seconds t, ZoneKind zone) {
      Skeleton sk;
      sk.t = t;
      sk.seq = seq++;
      sk.kind = EventKind::Other;
      sk.team = home.team;
      sk.zone = zone;
      skeletons.push_back(std::move(sk));
    };
    push_faceoff(0, ZoneKind::Neutral);
    push_faceoff(kPeriodSeconds, ZoneKind::Neutral);
    push_faceoff(2 * kPeriodSeconds, ZoneKind::Neutral);
    {
      int extra = 6 + static_cast<int>(rng.below(5));
      for (int i = 0; i < extra; ++i) {
        Skeleton sk;
        sk.t = 1 + static_cast<Seconds>(rng.below(kGameSeconds - 2));
        sk.seq = seq++;
        sk.kind = EventKind::Other;
        sk.team = rng.bernoulli(0.5) ? home.team : away.team;
        double z = rng.uniform();
        sk.zone = z < 0.4   ? ZoneKind::Offensive
                  : z < 0.7 ? ZoneKind::Neutral
                            : ZoneKind::Defensive;
        skeletons.push_back(std::move(sk));
      }
    }

    auto pick_shooter = [&](const Roster& roster, Seconds t,
                            const std::string& prefer) -> std::string {
      auto idx = on_ice(roster, t);
      if (idx.empty()) return {};
      if (!prefer.empty()) {
        for (std::size_t i : idx) {
          if (roster.skaters[i] == prefer) return prefer;
        }
        return {};
      }
      std::vector<double> weights;
      weights.reserve(idx.size());
      for (std::size_t i : idx) {
        weights.push_back(
            roster.positions[i] == PlayerPosition::Forward ? 2.0 : 1.0);
      }
      return roster.skaters[idx[rng.weighted(weights)]];
    };

    auto gen_team_shots = [&](const Roster& shooting, const Roster& defending) {
      double shift = result.truth.team_defense_shift.at(defending.team);
      double lambda_max = config.shot_rate * 1.5 / 3600.0;
      double tc = 0.0;
      while (true) {
        double u = rng.uniform();
        tc += -std::log(1.0 - u) / lambda_max;
        if (tc >= static_cast<double>(kGameSeconds)) break;
        Seconds t = static_cast<Seconds>(tc);

        // Thinning keeps the on-ice players' offense effects in the rate.
        double rate = config.shot_rate;
        for (std::size_t i : on_ice(shooting, t)) {
          rate += result.truth.player_effect.at(shooting.skaters[i]);
        }
        if (!rng.bernoulli(std::clamp(rate / (config.shot_rate * 1.5), 0.0,
                                      1.0))) {
          continue;
        }

        std::string shooter = pick_shooter(shooting, t, "");
        if (shooter.empty()) continue;

        Skeleton sk;
        sk.t = t;
        sk.seq = seq++;
        sk.on_goal_candidate = true;
        sk.team = shooting.team;
        sk.shooter = shooter;
        double dist = std::clamp(rng.uniform(5.0, 60.0) + shift, 2.0, 85.0);
        auto [x, y] = draw_location(rng, dist);
        sk.x = x;
        sk.y = y;
        sk.shot_type = draw_shot_type(rng, false);
        sk.zone = ZoneKind::Offensive;
        if (rng.bernoulli(config.empty_net_frac)) {
          sk.goalie_on_ice = false;
        } else {
          sk.goalie_id = defending.goalie;
        }
        bool spawn_rebound = rng.bernoulli(config.rebound_prob);
        bool spawn_missed = rng.bernoulli(config.missed_frac);
        bool spawn_blocked = rng.bernoulli(config.blocked_frac);
        bool spawn_neutral = rng.bernoulli(config.neutral_frac);
        Skeleton base = sk;
        skeletons.push_back(std::move(sk));

        if (spawn_rebound) {
          Seconds rt = t + 1 + static_cast<Seconds>(rng.below(2));
          if (rt < kGameSeconds && rt / kPeriodSeconds == t / kPeriodSeconds) {
            Skeleton reb;
            reb.t = rt;
            reb.seq = seq++;
            reb.on_goal_candidate = true;
            reb.team = shooting.team;
            std::string prefer =
                rng.bernoulli(0.5) ? base.shooter : std::string();
            reb.shooter = pick_shooter(shooting, rt, prefer);
            if (reb.shooter.empty()) reb.shooter = pick_shooter(shooting, rt, "");
            if (!reb.shooter.empty()) {
              double rdist = rng.uniform(3.0, 24.0);
              auto [rx, ry] = draw_location(rng, rdist);
              reb.x = rx;
              reb.y = ry;
              reb.shot_type = draw_shot_type(rng, true);
              reb.zone = ZoneKind::Offensive;
              reb.goalie_on_ice = base.goalie_on_ice;
              reb.goalie_id = base.goalie_id;
              skeletons.push_back(std::move(reb));
            }
          }
        }
        auto push_attempt = [&](EventKind kind) {
          Skeleton att;
          att.t = static_cast<Seconds>(rng.below(kGameSeconds));
          att.seq = seq++;
          att.kind = kind;
          att.team = shooting.team;
          att.shooter = pick_shooter(shooting, att.t, "");
          if (att.shooter.empty()) return;
          att.zone = ZoneKind::Offensive;
          att.goalie_id = defending.goalie;
          if (rng.bernoulli(0.5)) {
            double d = std::clamp(rng.uniform(5.0, 60.0) + shift, 2.0, 85.0);
            auto [ax, ay] = draw_location(rng, d);
            att.x = ax;
            att.y = ay;
          }
          skeletons.push_back(std::move(att));
        };
        if (spawn_missed) push_attempt(EventKind::MissedShot);
        if (spawn_blocked) push_attempt(EventKind::BlockedShot);
        if (spawn_neutral) {
          Skeleton nz;
          nz.t = static_cast<Seconds>(rng.below(kGameSeconds));
          nz.seq = seq++;
          nz.on_goal_candidate = true;
          nz.team = shooting.team;
          nz.shooter = pick_shooter(shooting, nz.t, "");
          if (!nz.shooter.empty()) {
            nz.x = rng.uniform(-24.0, 24.0);
            nz.y = rng.uniform(-40.0, 40.0);
            nz.shot_type = draw_shot_type(rng, false);
            nz.zone = ZoneKind::Neutral;
            nz.goalie_id = defending.goalie;
            skeletons.push_back(std::move(nz));
          }
        }
      }
    };
    gen_team_shots(home, away);
    gen_team_shots(away, home);

    std::sort(skeletons.begin(), skeletons.end(),
              [](const Skeleton& a, const Skeleton& b) {
                if (a.t != b.t) return a.t < b.t;
                return a.seq < b.seq;
              });

    // --- sequential labeling ---------------------------------------------
    std::vector<ShotEvent> game_events;
    game_events.reserve(skeletons.size());
    int score_home = 0, score_away = 0;
    for (const Skeleton& sk : skeletons) {
      ShotEvent e;
      e.game_id = gid;
      e.season = config.season;
      e.event_index = static_cast<int>(game_events.size());
      e.period = static_cast<int>(sk.t / kPeriodSeconds) + 1;
      e.clock = sk.t;
      e.kind = sk.kind;
      e.shooter_id = sk.shooter;
      e.shooter_team = sk.team;
      e.home_team = home.team;
      e.x = sk.x;
      e.y = sk.y;
      e.shot_type = sk.shot_type;
      bool team_is_home = sk.team == home.team;
      e.score_for = team_is_home ? score_home : score_away;
      e.score_against = team_is_home ? score_away : score_home;
      e.zone = sk.zone;
      e.goalie_on_ice = sk.goalie_on_ice;
      e.goalie_id = sk.goalie_id;

      if (sk.on_goal_candidate) {
        e.kind = EventKind::ShotOnGoal;
        double p = 0.08;
        if (e.zone == ZoneKind::Offensive && e.goalie_on_ice) {
          // Same context and feature path the downstream fit will use.
          const Roster& shooting = team_is_home ? home : away;
          const Roster& defending = team_is_home ? away : home;
          OnIceContext ctx;
          ctx.shot_event_index = e.event_index;
          for (const auto& s : game_shifts) {
            if (s.position == PlayerPosition::Goalie) continue;
            if (s.start_seconds <= e.clock && e.clock < s.end_seconds) {
              SkaterOnIce on{s.player_id, e.clock - s.start_seconds};
              if (s.team == shooting.team) {
                ctx.skaters_for.push_back(on);
              } else {
                ctx.skaters_against.push_back(on);
              }
            }
          }
          auto by_id = [](const SkaterOnIce& a, const SkaterOnIce& b) {
            return a.player_id < b.player_id;
          };
          std::sort(ctx.skaters_for.begin(), ctx.skaters_for.end(), by_id);
          std::sort(ctx.skaters_against.begin(), ctx.skaters_against.end(),
                    by_id);
          ctx.strength_for = static_cast<int>(ctx.skaters_for.size());
          ctx.strength_against = static_cast<int>(ctx.skaters_against.size());

          features::FeatureVector fv =
              features::build_features(e, ctx, game_events);
          double lp = 0.0;
          for (const auto& [name, coef] : result.truth.coefficients) {
            lp += coef * features::predictor_value(fv, name);
          }
          lp -= result.truth.goalie_skill.at(defending.goalie);
          p = glm::logistic(lp);
        }
        if (rng.bernoulli(p)) {
          e.kind = EventKind::Goal;
          (team_is_home ? score_home : score_away) += 1;
        }
      }
      game_events.push_back(std::move(e));
    }

    result.shifts.insert(result.shifts.end(), game_shifts.begin(),
                         game_shifts.end());
    result.events.insert(result.events.end(), game_events.begin(),
                         game_events.end());
  }
  return result;
}

void write_truth(std::ostream& out, const SynthConfig& config,
                 const TruthRecord& truth) {
  char buf[48];
  auto full = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << kTruthVersionLine << '\n';
  out << "seed " << config.seed << '\n';
  out << "n_games " << config.n_games << '\n';
  out << "teams " << config.teams << '\n';
  out << "players_per_team " << config.players_per_team << '\n';
  out << "shot_rate " << full(config.shot_rate) << '\n';
  out << "season " << config.season << '\n';
  for (const auto& [name, v] : truth.coefficients) {
    out << "coef " << name << ' ' << full(v) << '\n';
  }
  for (const auto& [id, v] : truth.goalie_skill) {
    out << "goalie_skill " << id << ' ' << full(v) << '\n';
  }
  for (const auto& [id, v] : truth.player_effect) {
    out << "player_effect " << id << ' ' << full(v) << '\n';
  }
  for (const auto& [id, v] : truth.team_defense_shift) {
    out << "team_defense_shift " << id << ' ' << full(v) << '\n';
  }
}

SynthPaths generate_files(const SynthConfig& config,
                          const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  SynthResult result = generate(config);
  SynthPaths paths;
  paths.events = out_dir / "events.csv";
  paths.shifts = out_dir / "shifts.csv";
  paths.truth = out_dir / "truth.txt";
  ingest::write_events_file(paths.events, result.events);
  ingest::write_shifts_file(paths.shifts, result.shifts);
  std::ofstream out(paths.truth, std::ios::binary);
  if (!out) {
    throw Error(ErrorCategory::Data, "cannot write " + paths.truth.string());
  }
  write_truth(out, config, result.truth);
  return paths;
}

}  // namespace puckweight::synth
