#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace gsr {

// World frame: origin at the center mark, X towards the right goal, Y along
// the middle line towards the camera, Z pointing down into the ground.
namespace pitch_dims {
inline constexpr double length = 105.0;
inline constexpr double width = 68.0;
inline constexpr double half_length = length / 2.0;
inline constexpr double half_width = width / 2.0;

// Sign of Y for the near (camera-side) side line. Flip here if a dataset
// turns out to put "Side line top" on the camera side.
inline constexpr double near_side_sign = +1.0;

// IFAB Laws of the Game.
inline constexpr double circle_radius = 9.15;
inline constexpr double penalty_area_depth = 16.5;
inline constexpr double penalty_area_width = 40.32;
inline constexpr double goal_area_depth = 5.5;
inline constexpr double goal_area_width = 18.32;
inline constexpr double penalty_mark_distance = 11.0;
inline constexpr double goal_width = 7.32;
inline constexpr double goal_height = 2.44;
}  // namespace pitch_dims

enum class LineClass {
  big_rect_left_bottom,
  big_rect_left_main,
  big_rect_left_top,
  big_rect_right_bottom,
  big_rect_right_main,
  big_rect_right_top,
  circle_central,
  circle_left,
  circle_right,
  goal_left_crossbar,
  goal_left_post_left,
  goal_left_post_right,
  goal_right_crossbar,
  goal_right_post_left,
  goal_right_post_right,
  middle_line,
  side_line_bottom,
  side_line_left,
  side_line_right,
  side_line_top,
  small_rect_left_bottom,
  small_rect_left_main,
  small_rect_left_top,
  small_rect_right_bottom,
  small_rect_right_main,
  small_rect_right_top,
};

inline constexpr std::size_t kLineClassCount = 26;

const std::array<LineClass, kLineClassCount>& all_line_classes();

// Annotation-schema string, e.g. "Side line top".
std::string_view line_class_name(LineClass c);

// Throws Error(invalid_argument) for names outside the 26 classes. Surrounding
// whitespace is tolerated.
LineClass parse_line_class(std::string_view name);
std::optional<LineClass> try_parse_line_class(std::string_view name);

// The class obtained by swapping "left" and "right" in the name.
LineClass mirrored(LineClass c);

bool is_circle(LineClass c);

struct Segment {
  Eigen::Vector3d a;
  Eigen::Vector3d b;
};

// Arc on the Z=0 plane, angles in radians measured from +X towards +Y,
// swept counter-clockwise from start to end.
struct CircleArc {
  Eigen::Vector3d center;
  double radius = 0.0;
  double start_angle = 0.0;
  double end_angle = 0.0;

  Eigen::Vector3d point_at(double angle) const;
};

using Geometry = std::variant<Segment, CircleArc>;

struct Keypoint {
  std::string name;
  Eigen::Vector3d position;
};

// Pair of template markings whose analytic intersection is a keypoint.
struct MarkingIntersection {
  LineClass first;
  LineClass second;
  std::string keypoint;
};

class PitchTemplate {
public:
  PitchTemplate();

  double length() const { return pitch_dims::length; }
  double width() const { return pitch_dims::width; }

  const Geometry& line_geometry(LineClass c) const;
  // Name-based lookup; throws Error(invalid_argument) for unknown classes.
  const Geometry& line_geometry(std::string_view name) const;

  const std::vector<Keypoint>& keypoints() const { return keypoints_; }
  const Keypoint& keypoint(std::string_view name) const;

  const std::vector<MarkingIntersection>& intersections() const { return intersections_; }

  // Dense samples of a marking, spaced at most `step` meters apart.
  std::vector<Eigen::Vector3d> sample(LineClass c, double step) const;

private:
  std::array<Geometry, kLineClassCount> lines_;
  std::vector<Keypoint> keypoints_;
  std::vector<MarkingIntersection> intersections_;
};

// Shared immutable instance.
const PitchTemplate& default_pitch();

std::vector<Keypoint> template_keypoints();

}  // namespace gsr
