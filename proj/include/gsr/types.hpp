#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gsr {

enum class Role { player, goalkeeper, referee, other };
enum class Team { left, right };

std::string_view to_string(Role r);
std::string_view to_string(Team t);
// Throw Error(schema) on strings outside the enumerations.
Role parse_role(std::string_view s);
Team parse_team(std::string_view s);

inline bool carries_team(Role r) { return r == Role::player || r == Role::goalkeeper; }

// Jersey numbers are compared numerically; "07" and "7" are the same jersey.
// Throws Error(schema) unless the text is 1-2 digits in [1, 99].
int parse_jersey(std::string_view s);

struct Attributes {
  Role role = Role::player;
  std::optional<Team> team;
  std::optional<int> jersey;

  friend bool operator==(const Attributes&, const Attributes&) = default;
};

// Image box, top-left anchored, pixels.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double center_x() const { return x + w / 2.0; }
  double center_y() const { return y + h / 2.0; }
  double bottom() const { return y + h; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

// Position on the pitch plane, meters.
struct PitchPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const PitchPoint&, const PitchPoint&) = default;
};

using TrackId = std::int64_t;

struct Detection {
  int frame = 0;
  TrackId track_id = 0;
  Attributes attributes;
  std::optional<BBox> bbox_image;
  std::optional<PitchPoint> pitch_point;
  std::optional<double> confidence;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Per-sequence game state. frames[i] holds the detections of frame i + 1.
struct GameState {
  std::string sequence;
  std::vector<std::vector<Detection>> frames;

  int num_frames() const { return static_cast<int>(frames.size()); }
  std::size_t num_detections() const;
  // Frame is 1-based; grows the frame list when needed.
  std::vector<Detection>& frame(int index);
  const std::vector<Detection>& frame(int index) const;

  friend bool operator==(const GameState&, const GameState&) = default;
};

}  // namespace gsr
