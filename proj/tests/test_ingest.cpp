#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "puckweight/errors.hpp"
#include "puckweight/ingest.hpp"
#include "puckweight/synth.hpp"
#include "test_util.hpp"

using namespace puckweight;

namespace {

const char* kThreeRowEvents =
    "#puckweight-events v1\n"
    "game_id,season,event_index,period,clock,kind,shooter,team,home_team,"
    "x,y,shot_type,score_for,score_against,zone,goalie_on_ice,goalie_id\n"
    "G1,2008,0,1,30,shot-on-goal,H1,HOME,HOME,76,5,wrist,0,0,offensive,1,AG\n"
    "G1,2008,1,1,31,goal,H2,HOME,HOME,80,-3,slap,0,0,offensive,1,AG\n"
    "G1,2008,2,1,900,missed-shot,A1,AWAY,HOME,,,,0,1,offensive,1,HG\n";

std::vector<ShotEvent> parse_str(const std::string& text) {
  std::istringstream in(text);
  return ingest::parse_events(in, "events");
}

}  // namespace

TEST_CASE("parse_events reads rows in order") {
  auto events = parse_str(kThreeRowEvents);
  REQUIRE(events.size() == 3);
  CHECK(events[0].shooter_id == "H1");
  CHECK(events[1].kind == EventKind::Goal);
  CHECK(events[2].kind == EventKind::MissedShot);
  CHECK(!events[2].x.has_value());
  CHECK(!events[2].shot_type.has_value());
}

TEST_CASE("parse_events rejects unknown shot types with the allowed list") {
  std::string text = kThreeRowEvents;
  auto pos = text.find("wrist");
  text.replace(pos, 5, "slapshot");
  try {
    parse_str(text);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::Parse);
    std::string msg = e.what();
    CHECK(msg.find(":3:") != std::string::npos);  // line number
    CHECK(msg.find("shot_type") != std::string::npos);
    for (const auto& tok : shot_type_tokens()) {
      CAPTURE(tok);
      CHECK(msg.find(tok) != std::string::npos);
    }
  }
}

TEST_CASE("parse_events accepts an empty body") {
  auto events = parse_str(
      "#puckweight-events v1\n"
      "game_id,season,event_index,period,clock,kind,shooter,team,home_team,"
      "x,y,shot_type,score_for,score_against,zone,goalie_on_ice,goalie_id\n");
  CHECK(events.empty());
}

TEST_CASE("parse_events rejects bad version and header lines") {
  std::istringstream in("#puckweight-events v2\nheader\n");
  CHECK_THROWS_AS(ingest::parse_events(in, "events"), Error);
  try {
    std::istringstream in2("#puckweight-events v2\nheader\n");
    ingest::parse_events(in2, "events");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::SchemaVersion);
  }
  std::istringstream in3(
      "#puckweight-events v1\ngame_id,season\nG1,2008\n");
  CHECK_THROWS_AS(ingest::parse_events(in3, "events"), Error);
}

TEST_CASE("parse_events enforces per-game ordering") {
  std::string text = kThreeRowEvents;
  auto pos = text.find("G1,2008,2,1,900");
  std::string bad = text.substr(0, pos) +
                    "G1,2008,2,1,20,missed-shot,A1,AWAY,HOME,,,,0,1,"
                    "offensive,1,HG\n";
  CHECK_THROWS_AS(parse_str(bad), Error);
}

TEST_CASE("parse_shifts accepts touching intervals and rejects overlaps") {
  auto parse = [](const std::string& rows) {
    std::istringstream in("#puckweight-shifts v1\n"
                          "game_id,player,team,position,start,end\n" +
                          rows);
    return ingest::parse_shifts(in, "shifts");
  };
  CHECK(parse("G1,P1,HOME,F,0,45\nG1,P1,HOME,F,60,110\n").size() == 2);
  CHECK(parse("G1,P1,HOME,F,0,45\nG1,P1,HOME,F,45,90\n").size() == 2);

  try {
    parse("G1,P1,HOME,F,0,45\nG1,P1,HOME,F,40,90\n");
    FAIL("expected overlap error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("P1") != std::string::npos);
    CHECK(msg.find("[40,90)") != std::string::npos);
  }

  CHECK_THROWS_AS(parse("G1,P1,HOME,F,45,45\n"), Error);
}

TEST_CASE("events round-trip through the canonical writer") {
  synth::SynthConfig config;
  config.seed = 7;
  config.n_games = 3;
  auto result = synth::generate(config);

  std::ostringstream out;
  ingest::write_events(out, result.events);
  auto reparsed = parse_str(out.str());
  CHECK(reparsed == result.events);

  std::ostringstream sout;
  ingest::write_shifts(sout, result.shifts);
  std::istringstream sin(sout.str());
  auto shifts = ingest::parse_shifts(sin, "shifts");
  CHECK(shifts == result.shifts);
}

TEST_CASE("join_on_ice reproduces the worked time-on-ice example") {
  // Three forwards 10 seconds into their shift, two defensemen 15 seconds in.
  std::vector<ShiftRecord> shifts;
  Seconds shot_time = 100;
  for (int i = 0; i < 3; ++i) {
    shifts.push_back(testutil::make_shift("G1", "F" + std::to_string(i),
                                          "HOME", PlayerPosition::Forward,
                                          shot_time - 10, shot_time + 20));
  }
  for (int i = 0; i < 2; ++i) {
    shifts.push_back(testutil::make_shift("G1", "D" + std::to_string(i),
                                          "HOME", PlayerPosition::Defenseman,
                                          shot_time - 15, shot_time + 20));
  }
  for (int i = 0; i < 5; ++i) {
    shifts.push_back(testutil::make_shift("G1", "A" + std::to_string(i),
                                          "AWAY", PlayerPosition::Forward, 0,
                                          shot_time + 50));
  }
  shifts.push_back(testutil::make_shift("G1", "HG", "HOME",
                                        PlayerPosition::Goalie, 0, 3600));
  auto shot = testutil::make_shot("G1", 0, shot_time, 80, 0,
                                  EventKind::ShotOnGoal, ShotType::Wrist,
                                  "F0");
  auto contexts = ingest::join_on_ice(std::vector<ShotEvent>{shot}, shifts);
  const auto& ctx = contexts.at(event_key(shot));

  std::vector<Seconds> on_ice;
  for (const auto& s : ctx.skaters_for) on_ice.push_back(s.seconds_on_ice);
  std::sort(on_ice.begin(), on_ice.end());
  CHECK(on_ice == std::vector<Seconds>{10, 10, 10, 15, 15});
  CHECK(ctx.strength_for == 5);
  CHECK(ctx.strength_against == 5);
}

TEST_CASE("join_on_ice uses half-open shift intervals") {
  std::vector<ShiftRecord> shifts = {
      testutil::make_shift("G1", "OUT", "HOME", PlayerPosition::Forward, 0,
                           100),
      testutil::make_shift("G1", "IN", "HOME", PlayerPosition::Forward, 100,
                           200),
      testutil::make_shift("G1", "H2", "HOME", PlayerPosition::Forward, 0,
                           200),
      testutil::make_shift("G1", "H3", "HOME", PlayerPosition::Forward, 0,
                           200),
      testutil::make_shift("G1", "A1", "AWAY", PlayerPosition::Forward, 0,
                           200),
      testutil::make_shift("G1", "A2", "AWAY", PlayerPosition::Forward, 0,
                           200),
      testutil::make_shift("G1", "A3", "AWAY", PlayerPosition::Forward, 0,
                           200),
      testutil::make_shift("G1", "A4", "AWAY", PlayerPosition::Forward, 0,
                           200),
  };
  auto shot = testutil::make_shot("G1", 0, 100, 80, 0, EventKind::ShotOnGoal,
                                  ShotType::Wrist, "IN");
  auto contexts = ingest::join_on_ice(std::vector<ShotEvent>{shot}, shifts);
  const auto& ctx = contexts.at(event_key(shot));

  std::vector<std::string> ids;
  for (const auto& s : ctx.skaters_for) ids.push_back(s.player_id);
  CHECK(std::find(ids.begin(), ids.end(), "OUT") == ids.end());
  auto in_it = std::find_if(ctx.skaters_for.begin(), ctx.skaters_for.end(),
                            [](const SkaterOnIce& s) {
                              return s.player_id == "IN";
                            });
  REQUIRE(in_it != ctx.skaters_for.end());
  CHECK(in_it->seconds_on_ice == 0);
  CHECK(ctx.strength_for == 3);
  CHECK(ctx.strength_against == 4);  // 5v4 style counts come from list sizes
}

TEST_CASE("join_on_ice is insensitive to shift ordering") {
  synth::SynthConfig config;
  config.seed = 11;
  config.n_games = 2;
  auto result = synth::generate(config);

  auto contexts = ingest::join_on_ice(result.events, result.shifts);
  auto shuffled = result.shifts;
  std::mt19937 rng(123);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto contexts2 = ingest::join_on_ice(result.events, shuffled);
  REQUIRE(contexts.size() == contexts2.size());
  for (const auto& [key, ctx] : contexts) {
    const auto& other = contexts2.at(key);
    CHECK(ctx.skaters_for == other.skaters_for);
    CHECK(ctx.skaters_against == other.skaters_against);
  }
}

TEST_CASE("seconds on ice stay below the covering shift's duration") {
  synth::SynthConfig config;
  config.seed = 13;
  config.n_games = 2;
  auto result = synth::generate(config);
  auto contexts = ingest::join_on_ice(result.events, result.shifts);

  std::map<std::pair<std::string, std::string>, std::vector<const ShiftRecord*>>
      by_player;
  for (const auto& s : result.shifts) {
    by_player[{s.game_id, s.player_id}].push_back(&s);
  }
  for (const auto& e : result.events) {
    if (!e.is_shot_class()) continue;
    const auto& ctx = contexts.at(event_key(e));
    for (const auto* list : {&ctx.skaters_for, &ctx.skaters_against}) {
      for (const auto& s : *list) {
        const auto& shifts = by_player.at({e.game_id, s.player_id});
        auto covering = std::find_if(
            shifts.begin(), shifts.end(), [&](const ShiftRecord* r) {
              return r->start_seconds <= e.clock && e.clock < r->end_seconds;
            });
        REQUIRE(covering != shifts.end());
        CHECK(s.seconds_on_ice == e.clock - (*covering)->start_seconds);
        CHECK(s.seconds_on_ice <
              (*covering)->end_seconds - (*covering)->start_seconds);
      }
    }
  }
}

TEST_CASE("join_on_ice rejects shots with empty ice") {
  std::vector<ShiftRecord> shifts = {
      testutil::make_shift("G1", "H1", "HOME", PlayerPosition::Forward, 0,
                           50)};
  auto shot = testutil::make_shot("G1", 0, 100, 80, 0, EventKind::ShotOnGoal);
  CHECK_THROWS_AS(ingest::join_on_ice(std::vector<ShotEvent>{shot}, shifts),
                  Error);
}
