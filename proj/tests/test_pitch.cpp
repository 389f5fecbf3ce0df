#include <cmath>
#include <set>
#include <variant>

#include <gtest/gtest.h>

#include "gsr/error.hpp"
#include "gsr/pitch.hpp"

using namespace gsr;
using Eigen::Vector3d;

namespace {

const Segment& segment(LineClass c) { return std::get<Segment>(default_pitch().line_geometry(c)); }

// Parameter of p along segment s, or NaN when p is off the supporting line.
double along(const Segment& s, const Vector3d& p) {
  const Vector3d d = s.b - s.a;
  const double t = (p - s.a).dot(d) / d.squaredNorm();
  if ((s.a + t * d - p).norm() > 1e-9) return std::nan("");
  return t;
}

}  // namespace

TEST(PitchTemplate, HasAll26Classes) {
  EXPECT_EQ(all_line_classes().size(), 26u);
  std::set<std::string> names;
  for (LineClass c : all_line_classes()) {
    names.insert(std::string(line_class_name(c)));
    EXPECT_EQ(parse_line_class(line_class_name(c)), c);
  }
  EXPECT_EQ(names.size(), 26u);
}

TEST(PitchTemplate, SideLineTopIsFarSide) {
  const Segment& s = std::get<Segment>(default_pitch().line_geometry("Side line top"));
  EXPECT_DOUBLE_EQ(s.a.y(), -34.0);
  EXPECT_DOUBLE_EQ(s.b.y(), -34.0);
  EXPECT_DOUBLE_EQ(std::min(s.a.x(), s.b.x()), -52.5);
  EXPECT_DOUBLE_EQ(std::max(s.a.x(), s.b.x()), 52.5);
  EXPECT_DOUBLE_EQ(s.a.z(), 0.0);
}

TEST(PitchTemplate, CentralCircle) {
  const auto& c = std::get<CircleArc>(default_pitch().line_geometry("Circle central"));
  EXPECT_EQ(c.center, Vector3d::Zero());
  EXPECT_DOUBLE_EQ(c.radius, 9.15);
}

TEST(PitchTemplate, UnknownClassThrows) {
  try {
    default_pitch().line_geometry("Side line diagonal");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
  }
}

TEST(PitchTemplate, NamesWithStraySpacesParse) {
  EXPECT_EQ(parse_line_class("Goal left post left "), LineClass::goal_left_post_left);
  EXPECT_FALSE(try_parse_line_class("Goal"));
}

TEST(PitchTemplate, GeometryInsideBounds) {
  const PitchTemplate& p = default_pitch();
  for (LineClass c : all_line_classes()) {
    for (const auto& q : p.sample(c, 0.5)) {
      EXPECT_LE(std::abs(q.x()), 52.5 + 1e-9) << line_class_name(c);
      EXPECT_LE(std::abs(q.y()), 34.0 + 1e-9) << line_class_name(c);
    }
  }
}

TEST(PitchTemplate, CrossbarAboveGround) {
  const Segment& s = segment(LineClass::goal_left_crossbar);
  EXPECT_DOUBLE_EQ(s.a.z(), -2.44);
  EXPECT_DOUBLE_EQ(s.b.z(), -2.44);
}

TEST(PitchKeypoints, Basics) {
  const PitchTemplate& p = default_pitch();
  EXPECT_EQ(p.keypoint("center mark").position, Vector3d::Zero());
  EXPECT_TRUE(p.keypoint("penalty mark left").position.isApprox(Vector3d(-41.5, 0, 0)));
  int corners = 0;
  for (const auto& k : p.keypoints()) {
    if (std::abs(std::abs(k.position.x()) - 52.5) < 1e-12 && std::abs(std::abs(k.position.y()) - 34) < 1e-12 &&
        k.position.z() == 0) {
      ++corners;
    }
  }
  EXPECT_EQ(corners, 4);
}

TEST(PitchKeypoints, DistinctAndDeterministic) {
  const auto a = template_keypoints();
  const auto b = template_keypoints();
  ASSERT_EQ(a.size(), b.size());
  EXPECT_GE(a.size(), 25u);
  std::set<std::string> names;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].name, b[i].name);
    EXPECT_EQ(a[i].position, b[i].position);
    names.insert(a[i].name);
    for (std::size_t j = 0; j < i; ++j) EXPECT_GT((a[i].position - a[j].position).norm(), 1e-6);
  }
  EXPECT_EQ(names.size(), a.size());
}

TEST(PitchKeypoints, DeclaredIntersectionsLieOnBothSegments) {
  const PitchTemplate& p = default_pitch();
  ASSERT_FALSE(p.intersections().empty());
  for (const auto& x : p.intersections()) {
    const Vector3d k = p.keypoint(x.keypoint).position;
    for (LineClass c : {x.first, x.second}) {
      const double t = along(segment(c), k);
      EXPECT_FALSE(std::isnan(t)) << x.keypoint << " off " << line_class_name(c);
      EXPECT_GE(t, -1e-9);
      EXPECT_LE(t, 1 + 1e-9);
    }
  }
}

TEST(PitchTemplate, MirrorSymmetric) {
  const PitchTemplate& p = default_pitch();
  for (LineClass c : all_line_classes()) {
    const LineClass m = mirrored(c);
    EXPECT_EQ(mirrored(m), c);
    // Compare dense samples as point sets after negating X.
    const auto a = p.sample(c, 0.25);
    const auto b = p.sample(m, 0.25);
    for (const auto& q : a) {
      const Vector3d r(-q.x(), q.y(), q.z());
      double best = 1e9;
      for (const auto& s : b) best = std::min(best, (s - r).norm());
      EXPECT_LT(best, 0.25) << line_class_name(c);
    }
    const Geometry& ga = p.line_geometry(c);
    const Geometry& gb = p.line_geometry(m);
    ASSERT_EQ(ga.index(), gb.index());
    if (const auto* s = std::get_if<Segment>(&ga)) {
      const Segment& t = std::get<Segment>(gb);
      const Vector3d a1(-s->a.x(), s->a.y(), s->a.z()), b1(-s->b.x(), s->b.y(), s->b.z());
      const double d = std::min((a1 - t.a).norm() + (b1 - t.b).norm(), (a1 - t.b).norm() + (b1 - t.a).norm());
      EXPECT_LT(d, 1e-9) << line_class_name(c);
    } else {
      const auto& ca = std::get<CircleArc>(ga);
      const auto& cb = std::get<CircleArc>(gb);
      EXPECT_NEAR(ca.center.x(), -cb.center.x(), 1e-9);
      EXPECT_NEAR(ca.radius, cb.radius, 1e-9);
      EXPECT_NEAR(ca.end_angle - ca.start_angle, cb.end_angle - cb.start_angle, 1e-9);
    }
  }
}

TEST(PitchTemplate, MirroredKeypointsExist) {
  const PitchTemplate& p = default_pitch();
  for (const auto& k : p.keypoints()) {
    const Vector3d r(-k.position.x(), k.position.y(), k.position.z());
    bool found = false;
    for (const auto& q : p.keypoints()) found = found || (q.position - r).norm() < 1e-9;
    EXPECT_TRUE(found) << k.name;
  }
}
