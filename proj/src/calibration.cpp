#include "gsr/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>
#include <json.hpp>

#include "gsr/error.hpp"

namespace gsr {

using Eigen::Vector2d;

namespace {

struct ImageLine {
  Vector2d point;
  Vector2d direction;
};

// Total-least-squares line through a pixel polyline. Empty when the points do
// not span a direction.
std::optional<ImageLine> fit_line(const Polyline& pts) {
  if (pts.size() < 2) return std::nullopt;
  Vector2d mean = Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  if (!(eig.eigenvalues()[1] > 1e-12)) return std::nullopt;
  return ImageLine{mean, eig.eigenvectors().col(1)};
}

std::optional<Vector2d> intersect(const ImageLine& a, const ImageLine& b) {
  Eigen::Matrix2d m;
  m.col(0) = a.direction;
  m.col(1) = -b.direction;
  const double det = m.determinant();
  // Lines closer than ~1 degree to parallel give unstable intersections.
  if (std::abs(det) < std::sin(M_PI / 180.0)) return std::nullopt;
  const Vector2d st = m.inverse() * (b.point - a.point);
  return a.point + st[0] * a.direction;
}

double convex_hull_area(std::vector<Vector2d> pts) {
  if (pts.size() < 3) return 0.0;
  std::sort(pts.begin(), pts.end(), [](const Vector2d& a, const Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  const auto cross = [](const Vector2d& o, const Vector2d& a, const Vector2d& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  std::vector<Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= 0) --k;
    hull[k++] = pts[i - 1];
  }
  hull.resize(k - 1);
  double area = 0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& p = hull[i];
    const auto& q = hull[(i + 1) % hull.size()];
    area += p.x() * q.y() - q.x() * p.y();
  }
  return std::abs(area) / 2.0;
}

bool is_straight_ground_marking(LineClass c) {
  switch (c) {
    case LineClass::circle_central:
    case LineClass::circle_left:
    case LineClass::circle_right:
    case LineClass::goal_left_crossbar:
    case LineClass::goal_left_post_left:
    case LineClass::goal_left_post_right:
    case LineClass::goal_right_crossbar:
    case LineClass::goal_right_post_left:
    case LineClass::goal_right_post_right:
      return false;
    default:
      return true;
  }
}

std::vector<Correspondence> intersections_from_pixels(const std::map<LineClass, Polyline>& lines,
                                                      const ImageSize& size, const PitchTemplate& pitch) {
  std::vector<Correspondence> out;
  std::map<LineClass, ImageLine> fitted;
  for (const auto& [cls, poly] : lines) {
    if (is_circle(cls)) continue;
    if (auto l = fit_line(poly)) fitted.emplace(cls, *l);
  }
  for (const auto& x : pitch.intersections()) {
    auto a = fitted.find(x.first);
    auto b = fitted.find(x.second);
    if (a == fitted.end() || b == fitted.end()) continue;
    auto p = intersect(a->second, b->second);
    if (!p || !size.contains(*p)) continue;
    out.push_back({pitch.keypoint(x.keypoint).position, *p, x.keypoint});
  }
  return out;
}

std::vector<Correspondence> ground_only(const std::vector<Correspondence>& corrs) {
  std::vector<Correspondence> out;
  for (const auto& c : corrs) {
    if (std::abs(c.world.z()) < 1e-9) out.push_back(c);
  }
  return out;
}

std::map<LineClass, Polyline> undistorted_lines(const std::map<LineClass, Polyline>& lines, const CameraParams& cam) {
  std::map<LineClass, Polyline> out;
  for (const auto& [cls, poly] : lines) {
    Polyline u;
    u.reserve(poly.size());
    for (const auto& p : poly) {
      u.push_back(cam.principal_point + cam.focal * undistort((p - cam.principal_point) / cam.focal, cam.k1));
    }
    out.emplace(cls, std::move(u));
  }
  return out;
}

struct HomographyAttempt {
  CameraParams camera;
  double residual_px;
  std::size_t correspondences;
};

std::optional<HomographyAttempt> calibrate_by_homography(const std::map<LineClass, Polyline>& lines,
                                                         const ImageSize& size, const PitchTemplate& pitch,
                                                         const CalibrationOptions& options) {
  std::vector<Polyline> straight;
  for (const auto& [cls, poly] : lines) {
    if (is_straight_ground_marking(cls)) straight.push_back(poly);
  }
  const bool can_fit_k1 = std::any_of(straight.begin(), straight.end(), [](const Polyline& p) { return p.size() >= 5; });

  std::optional<CameraParams> cam;
  std::vector<Correspondence> used;
  std::map<LineClass, Polyline> current = lines;
  for (int pass = 0; pass <= options.distortion_refinements; ++pass) {
    const std::vector<Correspondence> all = intersections_from_pixels(current, size, pitch);
    std::vector<Correspondence> ground = ground_only(all);
    if (ground.size() < 4) return std::nullopt;
    std::vector<Vector2d> world;
    for (const auto& c : ground) world.push_back(c.world.head<2>());
    if (convex_hull_area(world) < options.min_world_area_m2) return std::nullopt;
    try {
      const HomographyFit fit = estimate_homography(ground);
      CameraParams next = homography_to_camera(fit.homography, size);
      if (can_fit_k1) next.k1 = fit_radial_distortion(straight, next);
      cam = next;
      used = all;
    } catch (const Error&) {
      return std::nullopt;
    }
    if (cam->k1 == 0.0) break;
    if (pass < options.distortion_refinements) current = undistorted_lines(lines, *cam);
  }
  // Residuals are measured against the distorted intersections.
  const std::vector<Correspondence> observed = intersections_from_pixels(lines, size, pitch);
  const double residual = rms_reprojection_px(*cam, observed.empty() ? used : observed);
  return HomographyAttempt{*cam, residual, used.size()};
}

}  // namespace

Polyline to_pixels(const NormalizedPolyline& poly, const ImageSize& size) {
  Polyline out;
  out.reserve(poly.size());
  for (const auto& p : poly) out.emplace_back(p.x * size.width, p.y * size.height);
  return out;
}

std::vector<Correspondence> marking_intersections(const PitchLines& lines, const ImageSize& size,
                                                  const PitchTemplate& pitch) {
  std::map<LineClass, Polyline> px;
  for (const auto& [cls, poly] : lines) px.emplace(cls, to_pixels(poly, size));
  return intersections_from_pixels(px, size, pitch);
}

std::string_view to_string(CalibrationMethod m) {
  switch (m) {
    case CalibrationMethod::homography: return "homography";
    case CalibrationMethod::ptz: return "ptz";
    case CalibrationMethod::none: break;
  }
  return "none";
}

std::vector<FrameCalibration> calibrate_sequence(const SequenceRecord& seq, const PitchTemplate& pitch,
                                                 const CalibrationOptions& options) {
  const int n = seq.info.seq_length;
  std::vector<FrameCalibration> out(static_cast<std::size_t>(n));
  std::vector<std::map<LineClass, Polyline>> lines(static_cast<std::size_t>(n));
  std::vector<std::vector<Correspondence>> corrs(static_cast<std::size_t>(n));
  std::vector<ImageSize> sizes(static_cast<std::size_t>(n), ImageSize{seq.image_width(), seq.image_height()});

  for (const auto& im : seq.images) {
    if (im.frame >= 1 && im.frame <= n) sizes[static_cast<std::size_t>(im.frame - 1)] = {im.width, im.height};
  }
  for (int f = 1; f <= n; ++f) out[static_cast<std::size_t>(f - 1)].frame = f;
  for (const auto& p : seq.pitch) {
    if (p.frame < 1 || p.frame > n) continue;
    const auto i = static_cast<std::size_t>(p.frame - 1);
    for (const auto& [cls, poly] : p.lines) lines[i].emplace(cls, to_pixels(poly, sizes[i]));
  }

  // Steps 1-2.
  std::vector<CameraParams> solved;
  for (std::size_t i = 0; i < out.size(); ++i) {
    corrs[i] = intersections_from_pixels(lines[i], sizes[i], pitch);
    out[i].correspondences = corrs[i].size();
    auto attempt = calibrate_by_homography(lines[i], sizes[i], pitch, options);
    if (!attempt || attempt->camera.position.z() >= 0 || attempt->residual_px > options.residual_threshold_px) continue;
    out[i].method = CalibrationMethod::homography;
    out[i].camera = attempt->camera;
    out[i].residual_px = attempt->residual_px;
    solved.push_back(attempt->camera);
  }
  if (solved.empty()) return out;

  // Step 3.
  const Eigen::Vector3d fixed = median_camera_position(solved);
  if (fixed.z() >= 0) return out;
  double typical_k1 = 0.0;
  {
    std::vector<double> ks;
    for (const auto& c : solved) ks.push_back(c.k1);
    std::sort(ks.begin(), ks.end());
    typical_k1 = ks[ks.size() / 2];
  }

  // Step 4, seeded from the nearest calibrated frame when there is one.
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].calibrated() || corrs[i].size() < 2) continue;
    std::optional<CameraParams> init;
    for (std::size_t d = 1; d < out.size() && !init; ++d) {
      if (i >= d && out[i - d].method == CalibrationMethod::homography) init = out[i - d].camera;
      else if (i + d < out.size() && out[i + d].method == CalibrationMethod::homography) init = out[i + d].camera;
    }
    if (init) init->position = fixed;
    try {
      PtzOptions ptz_opts;
      ptz_opts.k1 = typical_k1;
      PtzFit fit = solve_ptz(fixed, corrs[i], sizes[i], init, ptz_opts);
      if (fit.rms_residual_px > options.residual_threshold_px) continue;
      out[i].method = CalibrationMethod::ptz;
      out[i].camera = fit.camera;
      out[i].residual_px = fit.rms_residual_px;
    } catch (const Error&) {
    }
  }
  return out;
}

std::string serialize_cameras(const std::vector<FrameCalibration>& frames) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& f : frames) {
    nlohmann::ordered_json j;
    j["frame"] = f.frame;
    j["calibrated"] = f.calibrated();
    j["method"] = std::string(to_string(f.method));
    if (f.camera) {
      const CameraParams& c = *f.camera;
      j["focal"] = c.focal;
      j["principal_point"] = {c.principal_point.x(), c.principal_point.y()};
      std::vector<double> r;
      for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) r.push_back(c.rotation(row, col));
      j["rotation"] = r;
      j["position"] = {c.position.x(), c.position.y(), c.position.z()};
      j["k1"] = c.k1;
      j["residual_px"] = f.residual_px;
    }
    doc.push_back(std::move(j));
  }
  return doc.dump(2);
}

std::vector<FrameCalibration> parse_cameras(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document.begin(), document.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::parse, std::string("malformed camera document: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::schema, "camera document must be an array");
  std::vector<FrameCalibration> out;
  try {
    for (const auto& j : doc) {
      FrameCalibration f;
      f.frame = j.at("frame").get<int>();
      const std::string method = j.value("method", std::string("none"));
      f.method = method == "homography" ? CalibrationMethod::homography
                 : method == "ptz"      ? CalibrationMethod::ptz
                                        : CalibrationMethod::none;
      if (j.at("calibrated").get<bool>()) {
        CameraParams c;
        c.focal = j.at("focal").get<double>();
        const auto pp = j.at("principal_point").get<std::vector<double>>();
        const auto r = j.at("rotation").get<std::vector<double>>();
        const auto pos = j.at("position").get<std::vector<double>>();
        if (pp.size() != 2 || r.size() != 9 || pos.size() != 3) {
          throw Error(ErrorCode::schema, "camera record for frame " + std::to_string(f.frame) + " is malformed");
        }
        c.principal_point = {pp[0], pp[1]};
        for (int k = 0; k < 9; ++k) c.rotation(k / 3, k % 3) = r[static_cast<std::size_t>(k)];
        c.position = {pos[0], pos[1], pos[2]};
        c.k1 = j.value("k1", 0.0);
        f.camera = c;
        f.residual_px = j.value("residual_px", 0.0);
        if (f.method == CalibrationMethod::none) f.method = CalibrationMethod::homography;
      }
      out.push_back(std::move(f));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::schema, std::string("camera document: ") + e.what());
  }
  return out;
}

}  // namespace gsr
