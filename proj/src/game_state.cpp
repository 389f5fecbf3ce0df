#include <algorithm>
#include <cctype>
#include <numeric>

#include "gsr/error.hpp"
#include "gsr/types.hpp"

namespace gsr {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::player: return "player";
    case Role::goalkeeper: return "goalkeeper";
    case Role::referee: return "referee";
    case Role::other: return "other";
  }
  return "other";
}

std::string_view to_string(Team t) { return t == Team::left ? "left" : "right"; }

Role parse_role(std::string_view s) {
  if (s == "player") return Role::player;
  if (s == "goalkeeper") return Role::goalkeeper;
  if (s == "referee") return Role::referee;
  if (s == "other") return Role::other;
  throw Error(ErrorCode::schema, "unknown role '" + std::string(s) + "'");
}

Team parse_team(std::string_view s) {
  if (s == "left") return Team::left;
  if (s == "right") return Team::right;
  throw Error(ErrorCode::schema, "unknown team '" + std::string(s) + "'");
}

int parse_jersey(std::string_view s) {
  const bool digits = !s.empty() && s.size() <= 2 &&
                      std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  if (!digits) throw Error(ErrorCode::schema, "invalid jersey '" + std::string(s) + "'");
  const int value = std::stoi(std::string(s));
  if (value < 1 || value > 99) throw Error(ErrorCode::schema, "jersey out of range '" + std::string(s) + "'");
  return value;
}

std::size_t GameState::num_detections() const {
  return std::accumulate(frames.begin(), frames.end(), std::size_t{0},
                         [](std::size_t n, const auto& f) { return n + f.size(); });
}

std::vector<Detection>& GameState::frame(int index) {
  if (index < 1) throw Error(ErrorCode::invalid_argument, "frame index must be >= 1");
  if (static_cast<std::size_t>(index) > frames.size()) frames.resize(static_cast<std::size_t>(index));
  return frames[static_cast<std::size_t>(index - 1)];
}

const std::vector<Detection>& GameState::frame(int index) const {
  if (index < 1 || static_cast<std::size_t>(index) > frames.size()) {
    throw Error(ErrorCode::invalid_argument, "frame index out of range: " + std::to_string(index));
  }
  return frames[static_cast<std::size_t>(index - 1)];
}

}  // namespace gsr
