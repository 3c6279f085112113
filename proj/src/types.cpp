#include "puckweight/types.hpp"

namespace puckweight {

const char* to_token(EventKind k) {
  switch (k) {
    case EventKind::ShotOnGoal: return "shot-on-goal";
    case EventKind::Goal: return "goal";
    case EventKind::MissedShot: return "missed-shot";
    case EventKind::BlockedShot: return "blocked-shot";
    case EventKind::Other: return "other";
  }
  return "?";
}

const char* to_token(ShotType t) {
  switch (t) {
    case ShotType::WrapAround: return "wrap-around";
    case ShotType::Wrist: return "wrist";
    case ShotType::Slap: return "slap";
    case ShotType::Backhand: return "backhand";
    case ShotType::Snap: return "snap";
    case ShotType::TipIn: return "tip-in";
  }
  return "?";
}

const char* to_token(ZoneKind z) {
  switch (z) {
    case ZoneKind::Offensive: return "offensive";
    case ZoneKind::Neutral: return "neutral";
    case ZoneKind::Defensive: return "defensive";
  }
  return "?";
}

const char* to_token(PlayerPosition p) {
  switch (p) {
    case PlayerPosition::Forward: return "F";
    case PlayerPosition::Defenseman: return "D";
    case PlayerPosition::Goalie: return "G";
  }
  return "?";
}

const char* to_token(Strength s) {
  switch (s) {
    case Strength::EV55: return "EV55";
    case Strength::EV44: return "EV44";
    case Strength::PP54: return "PP54";
    case Strength::PP53: return "PP53";
    case Strength::SH45: return "SH45";
    case Strength::SH35: return "SH35";
  }
  return "?";
}

namespace {

template <typename E>
std::optional<E> lookup(const std::string& tok, const std::vector<E>& all) {
  for (E e : all) {
    if (tok == to_token(e)) return e;
  }
  return std::nullopt;
}

}  // namespace

std::optional<EventKind> event_kind_from_token(const std::string& tok) {
  static const std::vector<EventKind> all = {
      EventKind::ShotOnGoal, EventKind::Goal, EventKind::MissedShot,
      EventKind::BlockedShot, EventKind::Other};
  return lookup(tok, all);
}

std::optional<ShotType> shot_type_from_token(const std::string& tok) {
  static const std::vector<ShotType> all = {
      ShotType::WrapAround, ShotType::Wrist, ShotType::Slap,
      ShotType::Backhand,   ShotType::Snap,  ShotType::TipIn};
  return lookup(tok, all);
}

std::optional<ZoneKind> zone_from_token(const std::string& tok) {
  static const std::vector<ZoneKind> all = {
      ZoneKind::Offensive, ZoneKind::Neutral, ZoneKind::Defensive};
  return lookup(tok, all);
}

std::optional<PlayerPosition> position_from_token(const std::string& tok) {
  static const std::vector<PlayerPosition> all = {
      PlayerPosition::Forward, PlayerPosition::Defenseman,
      PlayerPosition::Goalie};
  return lookup(tok, all);
}

std::optional<Strength> strength_from_token(const std::string& tok) {
  static const std::vector<Strength> all = {Strength::EV55, Strength::EV44,
                                            Strength::PP54, Strength::PP53,
                                            Strength::SH45, Strength::SH35};
  return lookup(tok, all);
}

const std::vector<std::string>& shot_type_tokens() {
  static const std::vector<std::string> toks = {
      to_token(ShotType::WrapAround), to_token(ShotType::Wrist),
      to_token(ShotType::Slap),       to_token(ShotType::Backhand),
      to_token(ShotType::Snap),       to_token(ShotType::TipIn)};
  return toks;
}

const std::vector<std::string>& strength_tokens() {
  static const std::vector<std::string> toks = {
      to_token(Strength::EV55), to_token(Strength::EV44),
      to_token(Strength::PP54), to_token(Strength::PP53),
      to_token(Strength::SH45), to_token(Strength::SH35)};
  return toks;
}

}  // namespace puckweight
