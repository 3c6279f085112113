#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "puckweight/types.hpp"

namespace puckweight::ingest {

inline constexpr const char* kEventsVersionLine = "#puckweight-events v1";
inline constexpr const char* kShiftsVersionLine = "#puckweight-shifts v1";
inline constexpr const char* kEventsHeader =
    "game_id,season,event_index,period,clock,kind,shooter,team,home_team,"
    "x,y,shot_type,score_for,score_against,zone,goalie_on_ice,goalie_id";
inline constexpr const char* kShiftsHeader =
    "game_id,player,team,position,start,end";

// Parses a v1 events file. The whole file is rejected on a bad version line
// or header; row errors carry the line number and field name.
std::vector<ShotEvent> parse_events(std::istream& in,
                                    const std::string& source_name = "events");
std::vector<ShotEvent> parse_events_file(const std::filesystem::path& path);

std::vector<ShiftRecord> parse_shifts(
    std::istream& in, const std::string& source_name = "shifts");
std::vector<ShiftRecord> parse_shifts_file(const std::filesystem::path& path);

// Canonical serialization; parse(write(x)) == x.
void write_events(std::ostream& out, std::span<const ShotEvent> events);
void write_shifts(std::ostream& out, std::span<const ShiftRecord> shifts);
void write_events_file(const std::filesystem::path& path,
                       std::span<const ShotEvent> events);
void write_shifts_file(const std::filesystem::path& path,
                       std::span<const ShiftRecord> shifts);

// For every shot-class event, the skaters on the ice at the shot time.
// Shift intervals are half-open [start, end): a shot at the exact second a
// shift ends belongs to the incoming player, not the departing one. Goalies
// never appear in the skater lists or strength counts.
std::map<EventKey, OnIceContext> join_on_ice(
    std::span<const ShotEvent> events, std::span<const ShiftRecord> shifts);

}  // namespace puckweight::ingest
