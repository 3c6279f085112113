#include "puckweight/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "puckweight/errors.hpp"

namespace puckweight::ingest {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void row_error(const std::string& source, int line,
                            const std::string& field,
                            const std::string& detail) {
  throw Error(ErrorCategory::Parse, source + ":" + std::to_string(line) +
                                        ": field '" + field + "': " + detail);
}

long long parse_int_field(const std::string& source, int line,
                          const std::string& field, const std::string& text) {
  long long value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    row_error(source, line, field, "expected integer, got '" + text + "'");
  }
  return value;
}

double parse_double_field(const std::string& source, int line,
                          const std::string& field, const std::string& text) {
  try {
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    row_error(source, line, field, "expected number, got '" + text + "'");
  }
}

void check_version(std::istream& in, const std::string& source,
                   const std::string& expected) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCategory::Parse, source + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) {
    throw Error(ErrorCategory::SchemaVersion,
                source + ": unsupported version line '" + line +
                    "', expected '" + expected + "'");
  }
}

void check_header(std::istream& in, const std::string& source,
                  const std::string& expected) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCategory::Parse, source + ": missing header line");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) {
    throw Error(ErrorCategory::Parse,
                source + ": malformed header '" + line + "'");
  }
}

std::string join_tokens(const std::vector<std::string>& toks) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out += ", ";
    out += toks[i];
  }
  return out;
}

std::string format_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<ShotEvent> parse_events(std::istream& in,
                                    const std::string& source_name) {
  check_version(in, source_name, kEventsVersionLine);
  check_header(in, source_name, kEventsHeader);

  std::vector<ShotEvent> events;
  // (last event_index, last clock) per game, for ordering validation
  std::unordered_map<std::string, std::pair<int, Seconds>> last_seen;

  std::string line;
  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 17) {
      throw Error(ErrorCategory::Parse,
                  source_name + ":" + std::to_string(line_no) + ": expected " +
                      "17 fields, got " + std::to_string(f.size()));
    }

    ShotEvent e;
    e.game_id = f[0];
    e.season = f[1];
    if (e.game_id.empty()) row_error(source_name, line_no, "game_id", "empty");
    e.event_index = static_cast<int>(
        parse_int_field(source_name, line_no, "event_index", f[2]));
    e.period =
        static_cast<int>(parse_int_field(source_name, line_no, "period", f[3]));
    if (e.period < 1) row_error(source_name, line_no, "period", "must be >= 1");
    e.clock = parse_int_field(source_name, line_no, "clock", f[4]);
    if (e.clock < 0) row_error(source_name, line_no, "clock", "must be >= 0");

    auto kind = event_kind_from_token(f[5]);
    if (!kind) {
      row_error(source_name, line_no, "kind", "unknown kind '" + f[5] + "'");
    }
    e.kind = *kind;

    e.shooter_id = f[6];
    e.shooter_team = f[7];
    e.home_team = f[8];
    if (e.is_shot_class() && e.shooter_id.empty()) {
      row_error(source_name, line_no, "shooter",
                "required for shot-class events");
    }
    if (e.shooter_team.empty()) {
      row_error(source_name, line_no, "team", "empty");
    }
    if (e.home_team.empty()) {
      row_error(source_name, line_no, "home_team", "empty");
    }

    bool on_goal = e.is_on_goal();
    if (!f[9].empty()) {
      e.x = parse_double_field(source_name, line_no, "x", f[9]);
    } else if (on_goal) {
      row_error(source_name, line_no, "x", "required for on-goal events");
    }
    if (!f[10].empty()) {
      e.y = parse_double_field(source_name, line_no, "y", f[10]);
    } else if (on_goal) {
      row_error(source_name, line_no, "y", "required for on-goal events");
    }

    if (!f[11].empty()) {
      auto st = shot_type_from_token(f[11]);
      if (!st) {
        row_error(source_name, line_no, "shot_type",
                  "unknown shot type '" + f[11] + "'; allowed values: " +
                      join_tokens(shot_type_tokens()));
      }
      e.shot_type = *st;
    } else if (on_goal) {
      row_error(source_name, line_no, "shot_type",
                "required for on-goal events");
    }

    e.score_for = static_cast<int>(
        parse_int_field(source_name, line_no, "score_for", f[12]));
    e.score_against = static_cast<int>(
        parse_int_field(source_name, line_no, "score_against", f[13]));
    if (e.score_for < 0 || e.score_against < 0) {
      row_error(source_name, line_no, "score_for", "scores must be >= 0");
    }

    auto zone = zone_from_token(f[14]);
    if (!zone) {
      row_error(source_name, line_no, "zone", "unknown zone '" + f[14] + "'");
    }
    e.zone = *zone;

    if (f[15] == "0") {
      e.goalie_on_ice = false;
    } else if (f[15] == "1") {
      e.goalie_on_ice = true;
    } else {
      row_error(source_name, line_no, "goalie_on_ice", "expected 0 or 1");
    }
    e.goalie_id = f[16];

    auto it = last_seen.find(e.game_id);
    if (it != last_seen.end()) {
      if (e.event_index <= it->second.first) {
        row_error(source_name, line_no, "event_index",
                  "must increase within a game");
      }
      if (e.clock < it->second.second) {
        row_error(source_name, line_no, "clock",
                  "decreases within game " + e.game_id);
      }
    }
    last_seen[e.game_id] = {e.event_index, e.clock};

    events.push_back(std::move(e));
  }
  return events;
}

std::vector<ShotEvent> parse_events_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCategory::MissingInput,
                "cannot open events file: " + path.string());
  }
  return parse_events(in, path.filename().string());
}

std::vector<ShiftRecord> parse_shifts(std::istream& in,
                                      const std::string& source_name) {
  check_version(in, source_name, kShiftsVersionLine);
  check_header(in, source_name, kShiftsHeader);

  std::vector<ShiftRecord> shifts;
  std::string line;
  int line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 6) {
      throw Error(ErrorCategory::Parse,
                  source_name + ":" + std::to_string(line_no) +
                      ": expected 6 fields, got " + std::to_string(f.size()));
    }
    ShiftRecord s;
    s.game_id = f[0];
    s.player_id = f[1];
    s.team = f[2];
    if (s.game_id.empty()) row_error(source_name, line_no, "game_id", "empty");
    if (s.player_id.empty()) row_error(source_name, line_no, "player", "empty");
    if (s.team.empty()) row_error(source_name, line_no, "team", "empty");
    auto pos = position_from_token(f[3]);
    if (!pos) {
      row_error(source_name, line_no, "position",
                "unknown position '" + f[3] + "', expected F, D, or G");
    }
    s.position = *pos;
    s.start_seconds = parse_int_field(source_name, line_no, "start", f[4]);
    s.end_seconds = parse_int_field(source_name, line_no, "end", f[5]);
    if (s.start_seconds < 0) {
      row_error(source_name, line_no, "start", "must be >= 0");
    }
    if (s.start_seconds >= s.end_seconds) {
      row_error(source_name, line_no, "end",
                "zero-length or inverted shift [" +
                    std::to_string(s.start_seconds) + "," +
                    std::to_string(s.end_seconds) + ")");
    }
    shifts.push_back(std::move(s));
  }

  // Per-player non-overlap within each game. Touching intervals are fine
  // under the half-open convention.
  std::map<std::pair<std::string, std::string>, std::vector<const ShiftRecord*>>
      by_player;
  for (const auto& s : shifts) {
    by_player[{s.game_id, s.player_id}].push_back(&s);
  }
  for (auto& [key, recs] : by_player) {
    std::sort(recs.begin(), recs.end(),
              [](const ShiftRecord* a, const ShiftRecord* b) {
                return a->start_seconds < b->start_seconds;
              });
    for (std::size_t i = 1; i < recs.size(); ++i) {
      if (recs[i]->start_seconds < recs[i - 1]->end_seconds) {
        throw Error(
            ErrorCategory::Data,
            source_name + ": overlapping shifts for player " + key.second +
                " in game " + key.first + ": [" +
                std::to_string(recs[i - 1]->start_seconds) + "," +
                std::to_string(recs[i - 1]->end_seconds) + ") overlaps [" +
                std::to_string(recs[i]->start_seconds) + "," +
                std::to_string(recs[i]->end_seconds) + ")");
      }
    }
  }
  return shifts;
}

std::vector<ShiftRecord> parse_shifts_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCategory::MissingInput,
                "cannot open shifts file: " + path.string());
  }
  return parse_shifts(in, path.filename().string());
}

void write_events(std::ostream& out, std::span<const ShotEvent> events) {
  out << kEventsVersionLine << '\n' << kEventsHeader << '\n';
  for (const auto& e : events) {
    out << e.game_id << ',' << e.season << ',' << e.event_index << ','
        << e.period << ',' << e.clock << ',' << to_token(e.kind) << ','
        << e.shooter_id << ',' << e.shooter_team << ',' << e.home_team << ','
        << (e.x ? format_coord(*e.x) : "") << ','
        << (e.y ? format_coord(*e.y) : "") << ','
        << (e.shot_type ? to_token(*e.shot_type) : "") << ',' << e.score_for
        << ',' << e.score_against << ',' << to_token(e.zone) << ','
        << (e.goalie_on_ice ? '1' : '0') << ',' << e.goalie_id << '\n';
  }
}

void write_shifts(std::ostream& out, std::span<const ShiftRecord> shifts) {
  out << kShiftsVersionLine << '\n' << kShiftsHeader << '\n';
  for (const auto& s : shifts) {
    out << s.game_id << ',' << s.player_id << ',' << s.team << ','
        << to_token(s.position) << ',' << s.start_seconds << ','
        << s.end_seconds << '\n';
  }
}

void write_events_file(const std::filesystem::path& path,
                       std::span<const ShotEvent> events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCategory::Data, "cannot write " + path.string());
  }
  write_events(out, events);
}

void write_shifts_file(const std::filesystem::path& path,
                       std::span<const ShiftRecord> shifts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCategory::Data, "cannot write " + path.string());
  }
  write_shifts(out, shifts);
}

std::map<EventKey, OnIceContext> join_on_ice(
    std::span<const ShotEvent> events, std::span<const ShiftRecord> shifts) {
  std::unordered_map<std::string, std::vector<const ShiftRecord*>> by_game;
  for (const auto& s : shifts) by_game[s.game_id].push_back(&s);

  std::map<EventKey, OnIceContext> contexts;
  for (const auto& e : events) {
    if (!e.is_shot_class()) continue;
    auto git = by_game.find(e.game_id);
    if (git == by_game.end()) {
      throw Error(ErrorCategory::Data,
                  "no shift data for game " + e.game_id);
    }
    OnIceContext ctx;
    ctx.shot_event_index = e.event_index;
    for (const ShiftRecord* s : git->second) {
      if (s->position == PlayerPosition::Goalie) continue;
      if (s->start_seconds <= e.clock && e.clock < s->end_seconds) {
        Seconds on_ice = e.clock - s->start_seconds;
        if (s->team == e.shooter_team) {
          ctx.skaters_for.push_back({s->player_id, on_ice});
        } else {
          ctx.skaters_against.push_back({s->player_id, on_ice});
        }
      }
    }
    auto by_id = [](const SkaterOnIce& a, const SkaterOnIce& b) {
      return a.player_id < b.player_id;
    };
    std::sort(ctx.skaters_for.begin(), ctx.skaters_for.end(), by_id);
    std::sort(ctx.skaters_against.begin(), ctx.skaters_against.end(), by_id);
    if (ctx.skaters_for.empty() || ctx.skaters_against.empty()) {
      throw Error(ErrorCategory::Data,
                  "no skaters on ice at game " + e.game_id + " t=" +
                      std::to_string(e.clock) + " (corrupt shift data)");
    }
    ctx.strength_for = static_cast<int>(ctx.skaters_for.size());
    ctx.strength_against = static_cast<int>(ctx.skaters_against.size());
    contexts.emplace(event_key(e), std::move(ctx));
  }
  return contexts;
}

}  // namespace puckweight::ingest
