#include "gsr/pitch.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "gsr/error.hpp"

namespace gsr {

namespace {

using Eigen::Vector3d;
namespace d = pitch_dims;

struct NamedClass {
  LineClass cls;
  std::string_view name;
};

constexpr std::array<NamedClass, kLineClassCount> kNames{{
    {LineClass::big_rect_left_bottom, "Big rect. left bottom"},
    {LineClass::big_rect_left_main, "Big rect. left main"},
    {LineClass::big_rect_left_top, "Big rect. left top"},
    {LineClass::big_rect_right_bottom, "Big rect. right bottom"},
    {LineClass::big_rect_right_main, "Big rect. right main"},
    {LineClass::big_rect_right_top, "Big rect. right top"},
    {LineClass::circle_central, "Circle central"},
    {LineClass::circle_left, "Circle left"},
    {LineClass::circle_right, "Circle right"},
    {LineClass::goal_left_crossbar, "Goal left crossbar"},
    {LineClass::goal_left_post_left, "Goal left post left"},
    {LineClass::goal_left_post_right, "Goal left post right"},
    {LineClass::goal_right_crossbar, "Goal right crossbar"},
    {LineClass::goal_right_post_left, "Goal right post left"},
    {LineClass::goal_right_post_right, "Goal right post right"},
    {LineClass::middle_line, "Middle line"},
    {LineClass::side_line_bottom, "Side line bottom"},
    {LineClass::side_line_left, "Side line left"},
    {LineClass::side_line_right, "Side line right"},
    {LineClass::side_line_top, "Side line top"},
    {LineClass::small_rect_left_bottom, "Small rect. left bottom"},
    {LineClass::small_rect_left_main, "Small rect. left main"},
    {LineClass::small_rect_left_top, "Small rect. left top"},
    {LineClass::small_rect_right_bottom, "Small rect. right bottom"},
    {LineClass::small_rect_right_main, "Small rect. right main"},
    {LineClass::small_rect_right_top, "Small rect. right top"},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::size_t index_of(LineClass c) { return static_cast<std::size_t>(c); }

Vector3d ground(double x, double y) { return {x, y, 0.0}; }

// Y coordinate of the near / far side for a given magnitude.
double near(double v) { return d::near_side_sign * v; }
double far(double v) { return -d::near_side_sign * v; }

}  // namespace

const std::array<LineClass, kLineClassCount>& all_line_classes() {
  static const auto classes = [] {
    std::array<LineClass, kLineClassCount> out{};
    for (std::size_t i = 0; i < kLineClassCount; ++i) out[i] = kNames[i].cls;
    return out;
  }();
  return classes;
}

std::string_view line_class_name(LineClass c) { return kNames[index_of(c)].name; }

std::optional<LineClass> try_parse_line_class(std::string_view name) {
  name = trim(name);
  for (const auto& entry : kNames) {
    if (entry.name == name) return entry.cls;
  }
  return std::nullopt;
}

LineClass parse_line_class(std::string_view name) {
  if (auto c = try_parse_line_class(name)) return *c;
  throw Error(ErrorCode::invalid_argument, "unknown line class '" + std::string(name) + "'");
}

LineClass mirrored(LineClass c) {
  std::string name(line_class_name(c));
  std::string out;
  std::size_t i = 0;
  while (i < name.size()) {
    if (name.compare(i, 4, "left") == 0) {
      out += "right";
      i += 4;
    } else if (name.compare(i, 5, "right") == 0) {
      out += "left";
      i += 5;
    } else {
      out += name[i++];
    }
  }
  return parse_line_class(out);
}

bool is_circle(LineClass c) {
  return c == LineClass::circle_central || c == LineClass::circle_left || c == LineClass::circle_right;
}

Vector3d CircleArc::point_at(double angle) const {
  return center + radius * Vector3d(std::cos(angle), std::sin(angle), 0.0);
}

PitchTemplate::PitchTemplate() {
  const double hl = d::half_length;
  const double hw = d::half_width;
  const double big_x = hl - d::penalty_area_depth;
  const double big_y = d::penalty_area_width / 2.0;
  const double small_x = hl - d::goal_area_depth;
  const double small_y = d::goal_area_width / 2.0;
  const double post_y = d::goal_width / 2.0;
  const double bar_z = -d::goal_height;
  const double mark_x = hl - d::penalty_mark_distance;
  // Half-angle of the penalty arc outside the penalty area.
  const double arc_half = std::acos((big_x - mark_x) / d::circle_radius);
  const double arc_y = std::sqrt(d::circle_radius * d::circle_radius -
                                 (big_x - mark_x) * (big_x - mark_x));
  const double pi = std::numbers::pi;

  auto set = [&](LineClass c, Geometry g) { lines_[index_of(c)] = std::move(g); };
  auto seg = [](Vector3d a, Vector3d b) { return Geometry{Segment{a, b}}; };

  set(LineClass::side_line_top, seg(ground(-hl, far(hw)), ground(hl, far(hw))));
  set(LineClass::side_line_bottom, seg(ground(-hl, near(hw)), ground(hl, near(hw))));
  set(LineClass::side_line_left, seg(ground(-hl, far(hw)), ground(-hl, near(hw))));
  set(LineClass::side_line_right, seg(ground(hl, far(hw)), ground(hl, near(hw))));
  set(LineClass::middle_line, seg(ground(0, far(hw)), ground(0, near(hw))));

  for (const double side : {-1.0, 1.0}) {
    const bool left = side < 0;
    const auto pick = [left](LineClass l, LineClass r) { return left ? l : r; };
    set(pick(LineClass::big_rect_left_top, LineClass::big_rect_right_top),
        seg(ground(side * hl, far(big_y)), ground(side * big_x, far(big_y))));
    set(pick(LineClass::big_rect_left_bottom, LineClass::big_rect_right_bottom),
        seg(ground(side * hl, near(big_y)), ground(side * big_x, near(big_y))));
    set(pick(LineClass::big_rect_left_main, LineClass::big_rect_right_main),
        seg(ground(side * big_x, far(big_y)), ground(side * big_x, near(big_y))));
    set(pick(LineClass::small_rect_left_top, LineClass::small_rect_right_top),
        seg(ground(side * hl, far(small_y)), ground(side * small_x, far(small_y))));
    set(pick(LineClass::small_rect_left_bottom, LineClass::small_rect_right_bottom),
        seg(ground(side * hl, near(small_y)), ground(side * small_x, near(small_y))));
    set(pick(LineClass::small_rect_left_main, LineClass::small_rect_right_main),
        seg(ground(side * small_x, far(small_y)), ground(side * small_x, near(small_y))));

    // Posts are named as seen from the center mark facing the goal. Facing
    // the left goal, the viewer's left hand points to the near side.
    const double left_post_y = left ? near(post_y) : far(post_y);
    const double right_post_y = -left_post_y;
    set(pick(LineClass::goal_left_post_left, LineClass::goal_right_post_left),
        seg(Vector3d(side * hl, left_post_y, 0.0), Vector3d(side * hl, left_post_y, bar_z)));
    set(pick(LineClass::goal_left_post_right, LineClass::goal_right_post_right),
        seg(Vector3d(side * hl, right_post_y, 0.0), Vector3d(side * hl, right_post_y, bar_z)));
    set(pick(LineClass::goal_left_crossbar, LineClass::goal_right_crossbar),
        seg(Vector3d(side * hl, far(post_y), bar_z), Vector3d(side * hl, near(post_y), bar_z)));

    CircleArc arc;
    arc.center = ground(side * mark_x, 0.0);
    arc.radius = d::circle_radius;
    arc.start_angle = left ? -arc_half : pi - arc_half;
    arc.end_angle = left ? arc_half : pi + arc_half;
    set(pick(LineClass::circle_left, LineClass::circle_right), arc);
  }

  CircleArc central;
  central.center = ground(0, 0);
  central.radius = d::circle_radius;
  central.start_angle = 0.0;
  central.end_angle = 2.0 * pi;
  set(LineClass::circle_central, central);

  auto kp = [&](std::string name, Vector3d p) { keypoints_.push_back({std::move(name), p}); };
  kp("center mark", ground(0, 0));
  kp("corner top left", ground(-hl, far(hw)));
  kp("corner top right", ground(hl, far(hw)));
  kp("corner bottom left", ground(-hl, near(hw)));
  kp("corner bottom right", ground(hl, near(hw)));
  kp("middle line top", ground(0, far(hw)));
  kp("middle line bottom", ground(0, near(hw)));
  kp("center circle top", ground(0, far(d::circle_radius)));
  kp("center circle bottom", ground(0, near(d::circle_radius)));
  kp("center circle left", ground(-d::circle_radius, 0));
  kp("center circle right", ground(d::circle_radius, 0));

  for (const double side : {-1.0, 1.0}) {
    const std::string s = side < 0 ? "left" : "right";
    kp("big rect " + s + " top goal line", ground(side * hl, far(big_y)));
    kp("big rect " + s + " top corner", ground(side * big_x, far(big_y)));
    kp("big rect " + s + " bottom goal line", ground(side * hl, near(big_y)));
    kp("big rect " + s + " bottom corner", ground(side * big_x, near(big_y)));
    kp("small rect " + s + " top goal line", ground(side * hl, far(small_y)));
    kp("small rect " + s + " top corner", ground(side * small_x, far(small_y)));
    kp("small rect " + s + " bottom goal line", ground(side * hl, near(small_y)));
    kp("small rect " + s + " bottom corner", ground(side * small_x, near(small_y)));
    kp("penalty mark " + s, ground(side * mark_x, 0));
    kp("penalty arc " + s + " top", ground(side * big_x, far(arc_y)));
    kp("penalty arc " + s + " bottom", ground(side * big_x, near(arc_y)));
    const double lp = side < 0 ? near(post_y) : far(post_y);
    kp("goal " + s + " post left base", ground(side * hl, lp));
    kp("goal " + s + " post right base", ground(side * hl, -lp));
    kp("goal " + s + " post left top", Vector3d(side * hl, lp, bar_z));
    kp("goal " + s + " post right top", Vector3d(side * hl, -lp, bar_z));
  }

  using L = LineClass;
  intersections_ = {
      {L::side_line_top, L::side_line_left, "corner top left"},
      {L::side_line_top, L::side_line_right, "corner top right"},
      {L::side_line_bottom, L::side_line_left, "corner bottom left"},
      {L::side_line_bottom, L::side_line_right, "corner bottom right"},
      {L::side_line_top, L::middle_line, "middle line top"},
      {L::side_line_bottom, L::middle_line, "middle line bottom"},
  };
  for (const bool left : {true, false}) {
    const std::string s = left ? "left" : "right";
    const auto pick = [left](L l, L r) { return left ? l : r; };
    const L goal_line = pick(L::side_line_left, L::side_line_right);
    const L big_top = pick(L::big_rect_left_top, L::big_rect_right_top);
    const L big_bottom = pick(L::big_rect_left_bottom, L::big_rect_right_bottom);
    const L big_main = pick(L::big_rect_left_main, L::big_rect_right_main);
    const L small_top = pick(L::small_rect_left_top, L::small_rect_right_top);
    const L small_bottom = pick(L::small_rect_left_bottom, L::small_rect_right_bottom);
    const L small_main = pick(L::small_rect_left_main, L::small_rect_right_main);
    const L post_l = pick(L::goal_left_post_left, L::goal_right_post_left);
    const L post_r = pick(L::goal_left_post_right, L::goal_right_post_right);
    const L bar = pick(L::goal_left_crossbar, L::goal_right_crossbar);
    intersections_.push_back({big_top, goal_line, "big rect " + s + " top goal line"});
    intersections_.push_back({big_top, big_main, "big rect " + s + " top corner"});
    intersections_.push_back({big_bottom, goal_line, "big rect " + s + " bottom goal line"});
    intersections_.push_back({big_bottom, big_main, "big rect " + s + " bottom corner"});
    intersections_.push_back({small_top, goal_line, "small rect " + s + " top goal line"});
    intersections_.push_back({small_top, small_main, "small rect " + s + " top corner"});
    intersections_.push_back({small_bottom, goal_line, "small rect " + s + " bottom goal line"});
    intersections_.push_back({small_bottom, small_main, "small rect " + s + " bottom corner"});
    intersections_.push_back({post_l, goal_line, "goal " + s + " post left base"});
    intersections_.push_back({post_r, goal_line, "goal " + s + " post right base"});
    intersections_.push_back({post_l, bar, "goal " + s + " post left top"});
    intersections_.push_back({post_r, bar, "goal " + s + " post right top"});
  }
}

const Geometry& PitchTemplate::line_geometry(LineClass c) const { return lines_[index_of(c)]; }

const Geometry& PitchTemplate::line_geometry(std::string_view name) const {
  return line_geometry(parse_line_class(name));
}

const Keypoint& PitchTemplate::keypoint(std::string_view name) const {
  auto it = std::find_if(keypoints_.begin(), keypoints_.end(),
                         [&](const Keypoint& k) { return k.name == name; });
  if (it == keypoints_.end()) {
    throw Error(ErrorCode::invalid_argument, "unknown keypoint '" + std::string(name) + "'");
  }
  return *it;
}

std::vector<Vector3d> PitchTemplate::sample(LineClass c, double step) const {
  std::vector<Vector3d> out;
  const Geometry& g = line_geometry(c);
  if (const auto* s = std::get_if<Segment>(&g)) {
    const int n = std::max(1, static_cast<int>(std::ceil((s->b - s->a).norm() / step)));
    for (int i = 0; i <= n; ++i) out.push_back(s->a + (s->b - s->a) * (double(i) / n));
  } else {
    const auto& arc = std::get<CircleArc>(g);
    const double sweep = arc.end_angle - arc.start_angle;
    const int n = std::max(2, static_cast<int>(std::ceil(sweep * arc.radius / step)));
    for (int i = 0; i <= n; ++i) out.push_back(arc.point_at(arc.start_angle + sweep * i / n));
  }
  return out;
}

const PitchTemplate& default_pitch() {
  static const PitchTemplate pitch;
  return pitch;
}

std::vector<Keypoint> template_keypoints() { return default_pitch().keypoints(); }

}  // namespace gsr
