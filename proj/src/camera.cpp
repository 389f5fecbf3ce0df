#include "gsr/camera.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "gsr/error.hpp"

namespace gsr {

using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

Matrix3d rot_x(double a) {
  Matrix3d r;
  r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return r;
}

Matrix3d rot_z(double a) {
  Matrix3d r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

}  // namespace

Homography Homography::normalized(const Matrix3d& raw) {
  Homography h;
  h.m = raw;
  if (std::abs(raw(2, 2)) > 1e-300) h.m /= raw(2, 2);
  return h;
}

Vector2d Homography::apply(const Vector2d& pitch) const {
  const Vector3d q = m * Vector3d(pitch.x(), pitch.y(), 1.0);
  return q.head<2>() / q.z();
}

Matrix3d CameraParams::intrinsics() const {
  Matrix3d k;
  k << focal, 0, principal_point.x(), 0, focal, principal_point.y(), 0, 0, 1;
  return k;
}

Matrix3d ptz_rotation(const PtzAngles& a) { return rot_z(a.roll) * rot_x(a.tilt) * rot_z(-a.pan); }

PtzAngles ptz_angles(const Matrix3d& r) {
  PtzAngles a;
  a.tilt = -std::acos(std::clamp(r(2, 2), -1.0, 1.0));
  const double st = std::sin(a.tilt);
  if (std::abs(st) < 1e-12) {
    // Looking straight down: pan and roll are the same rotation.
    a.pan = 0.0;
    a.roll = std::atan2(r(1, 0), r(0, 0));
    return a;
  }
  a.pan = std::atan2(r(2, 0) / st * -1.0, r(2, 1) / st);
  a.roll = std::atan2(r(0, 2) / st, -r(1, 2) / st);
  return a;
}

CameraParams camera_from_ptz(const Vector3d& position, const PtzAngles& angles, double focal, const ImageSize& size,
                             double k1) {
  CameraParams cam;
  cam.focal = focal;
  cam.principal_point = size.center();
  cam.rotation = ptz_rotation(angles);
  cam.position = position;
  cam.k1 = k1;
  return cam;
}

CameraParams look_at(const Vector3d& position, const Vector3d& target, double focal, const ImageSize& size,
                     double k1) {
  const Vector3d z = (target - position).normalized();
  const Vector3d down(0, 0, 1);
  Vector3d x = down.cross(z);
  if (x.norm() < 1e-12) x = Vector3d::UnitX();
  x.normalize();
  const Vector3d y = z.cross(x);
  CameraParams cam;
  cam.focal = focal;
  cam.principal_point = size.center();
  cam.rotation.row(0) = x.transpose();
  cam.rotation.row(1) = y.transpose();
  cam.rotation.row(2) = z.transpose();
  cam.position = position;
  cam.k1 = k1;
  return cam;
}

Homography compose_homography(const CameraParams& cam) {
  const Vector3d t = -cam.rotation * cam.position;
  Matrix3d rt;
  rt.col(0) = cam.rotation.col(0);
  rt.col(1) = cam.rotation.col(1);
  rt.col(2) = t;
  return Homography::normalized(cam.intrinsics() * rt);
}

Vector2d distort(const Vector2d& u, double k1) { return u * (1.0 + k1 * u.squaredNorm()); }

Vector2d undistort(const Vector2d& d, double k1) {
  const double rd = d.norm();
  if (k1 == 0.0 || rd == 0.0) return d;
  double ru = rd;
  for (int i = 0; i < 20; ++i) {
    const double f = ru * (1.0 + k1 * ru * ru) - rd;
    const double df = 1.0 + 3.0 * k1 * ru * ru;
    if (df <= 0.0) break;
    const double step = f / df;
    ru -= step;
    if (std::abs(step) < 1e-12 * std::max(1.0, ru)) break;
  }
  return d * (ru / rd);
}

std::optional<Vector2d> try_project(const CameraParams& cam, const Vector3d& world) {
  const Vector3d c = cam.to_camera(world);
  if (!(c.z() > 1e-9)) return std::nullopt;
  const Vector2d u = c.head<2>() / c.z();
  // Beyond this radius a negative k1 folds the image back on itself.
  if (cam.k1 < 0 && 3.0 * -cam.k1 * u.squaredNorm() >= 1.0) return std::nullopt;
  const Vector2d n = distort(u, cam.k1);
  return cam.principal_point + cam.focal * n;
}

Vector2d project(const CameraParams& cam, const Vector3d& world) {
  if (auto p = try_project(cam, world)) return *p;
  throw Error(ErrorCode::invalid_argument, "point is behind the camera or past the distortion fold");
}

PitchPoint unproject_to_pitch(const CameraParams& cam, const Vector2d& pixel) {
  const Vector2d n = undistort((pixel - cam.principal_point) / cam.focal, cam.k1);
  const Vector3d dir = cam.rotation.transpose() * Vector3d(n.x(), n.y(), 1.0);
  if (std::abs(dir.z()) < 1e-12 * dir.norm()) {
    throw Error(ErrorCode::no_solution, "pixel ray is parallel to the pitch plane");
  }
  const double s = -cam.position.z() / dir.z();
  if (!(s > 0.0)) throw Error(ErrorCode::no_solution, "pixel ray meets the pitch plane behind the camera");
  const Vector3d p = cam.position + s * dir;
  return {p.x(), p.y()};
}

PitchPoint unproject_to_pitch(const Homography& h, const Vector2d& pixel) {
  Eigen::FullPivLU<Matrix3d> lu(h.m);
  if (!lu.isInvertible()) throw Error(ErrorCode::degenerate, "homography is not invertible");
  const Vector3d q = lu.solve(Vector3d(pixel.x(), pixel.y(), 1.0));
  if (std::abs(q.z()) < 1e-12 * q.norm()) {
    throw Error(ErrorCode::no_solution, "pixel lies on the horizon of the pitch plane");
  }
  return {q.x() / q.z(), q.y() / q.z()};
}

PitchPoint bbox_bottom_to_pitch(const CameraParams& cam, const BBox& box) {
  return unproject_to_pitch(cam, Vector2d(box.center_x(), box.bottom()));
}

PitchPoint bbox_bottom_to_pitch(const Homography& h, const BBox& box) {
  return unproject_to_pitch(h, Vector2d(box.center_x(), box.bottom()));
}

// --- radial distortion -------------------------------------------------------

namespace {

struct LineResiduals {
  std::vector<double> values;
  bool valid = true;
};

// Signed distances of undistorted points from their total-least-squares line,
// divided by the chord length. The normal is oriented against the chord so that
// the sign stays stable as k1 varies.
LineResiduals straightness_residuals(std::span<const Polyline> polylines, const CameraParams& cam, double k1) {
  LineResiduals out;
  for (const Polyline& poly : polylines) {
    if (poly.size() < 5) continue;
    std::vector<Vector2d> pts;
    pts.reserve(poly.size());
    for (const Vector2d& p : poly) {
      const Vector2d d = (p - cam.principal_point) / cam.focal;
      const Vector2d u = undistort(d, k1);
      if ((distort(u, k1) - d).norm() > 1e-9) out.valid = false;
      pts.push_back(u);
    }
    Vector2d mean = Vector2d::Zero();
    for (const auto& p : pts) mean += p;
    mean /= static_cast<double>(pts.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    Vector2d normal = eig.eigenvectors().col(0);
    const Vector2d chord = pts.back() - pts.front();
    if (normal.dot(Vector2d(-chord.y(), chord.x())) < 0) normal = -normal;
    // Relative to the chord: strong positive k1 shrinks everything otherwise.
    const double len = chord.norm();
    if (!(len > 0)) {
      out.valid = false;
      continue;
    }
    for (const auto& p : pts) out.values.push_back(normal.dot(p - mean) / len);
  }
  return out;
}

double sum_squares(const LineResiduals& r) {
  if (!r.valid) return std::numeric_limits<double>::infinity();
  double s = 0;
  for (double v : r.values) s += v * v;
  return s;
}

}  // namespace

double fit_radial_distortion(std::span<const Polyline> polylines, const CameraParams& cam) {
  const bool usable = std::any_of(polylines.begin(), polylines.end(), [](const Polyline& p) { return p.size() >= 5; });
  if (!usable) throw Error(ErrorCode::invalid_argument, "distortion fit needs a polyline with at least 5 points");

  const double lo = -kMaxRadialCoefficient;
  const double hi = kMaxRadialCoefficient;
  const auto cost = [&](double k) { return sum_squares(straightness_residuals(polylines, cam, k)); };

  constexpr int kScan = 100;
  double best_k = 0.0;
  double best_cost = cost(0.0);
  for (int i = 0; i <= kScan; ++i) {
    const double k = lo + (hi - lo) * i / kScan;
    const double c = cost(k);
    if (c < best_cost) {
      best_cost = c;
      best_k = k;
    }
  }

  // Golden-section search around the best scan point.
  const double cell = (hi - lo) / kScan;
  double a = std::max(lo, best_k - cell);
  double b = std::min(hi, best_k + cell);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a);
  double x2 = a + g * (b - a);
  double f1 = cost(x1);
  double f2 = cost(x2);
  for (int i = 0; i < 80 && b - a > 1e-14; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = cost(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = cost(x2);
    }
  }
  double k = 0.5 * (a + b);
  double c = cost(k);
  if (best_cost < c) {
    k = best_k;
    c = best_cost;
  }

  // Gauss-Newton on the residual vector resolves k1 far below the precision a
  // search over squared residuals can reach.
  for (int it = 0; it < 8; ++it) {
    const LineResiduals r = straightness_residuals(polylines, cam, k);
    const double h = 1e-7;
    const LineResiduals rp = straightness_residuals(polylines, cam, std::min(hi, k + h));
    const LineResiduals rm = straightness_residuals(polylines, cam, std::max(lo, k - h));
    const double span = std::min(hi, k + h) - std::max(lo, k - h);
    if (!r.valid || !rp.valid || !rm.valid || r.values.size() != rp.values.size() ||
        r.values.size() != rm.values.size()) {
      break;
    }
    double jr = 0, jj = 0;
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      const double j = (rp.values[i] - rm.values[i]) / span;
      jr += j * r.values[i];
      jj += j * j;
    }
    if (jj <= 0) break;
    const double next = std::clamp(k - jr / jj, lo, hi);
    const double next_cost = cost(next);
    if (!(next_cost <= c)) break;
    const bool done = std::abs(next - k) < 1e-16;
    k = next;
    c = next_cost;
    if (done) break;
  }
  return k;
}

Vector3d median_camera_position(std::span<const CameraParams> cams) {
  if (cams.empty()) throw Error(ErrorCode::invalid_argument, "median of an empty camera list");
  Vector3d out;
  std::vector<double> v(cams.size());
  for (int axis = 0; axis < 3; ++axis) {
    for (std::size_t i = 0; i < cams.size(); ++i) v[i] = cams[i].position[axis];
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    out[axis] = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
  return out;
}

// --- PTZ ---------------------------------------------------------------------

double rms_reprojection_px(const CameraParams& cam, std::span<const Correspondence> corrs) {
  if (corrs.empty()) return 0.0;
  double s = 0;
  for (const auto& c : corrs) {
    auto p = try_project(cam, c.world);
    if (!p) return std::numeric_limits<double>::infinity();
    s += (*p - c.image).squaredNorm();
  }
  return std::sqrt(s / static_cast<double>(corrs.size()));
}

namespace {

constexpr double kBehindPenalty = 1e4;

struct PtzProblem {
  Vector3d position;
  std::span<const Correspondence> corrs;
  ImageSize size;
  double k1;

  CameraParams camera(const Eigen::Vector3d& theta) const {
    return camera_from_ptz(position, {theta[1], theta[2], 0.0}, std::exp(theta[0]), size, k1);
  }

  Eigen::VectorXd residuals(const Eigen::Vector3d& theta) const {
    const CameraParams cam = camera(theta);
    Eigen::VectorXd r(2 * corrs.size());
    for (std::size_t i = 0; i < corrs.size(); ++i) {
      if (auto p = try_project(cam, corrs[i].world)) {
        r.segment<2>(2 * i) = *p - corrs[i].image;
      } else {
        r.segment<2>(2 * i).setConstant(kBehindPenalty);
      }
    }
    return r;
  }
};

struct LmResult {
  Eigen::Vector3d theta;
  double cost;
  int iterations;
  bool converged;
};

LmResult levenberg_marquardt(const PtzProblem& prob, Eigen::Vector3d theta, int max_iterations) {
  Eigen::VectorXd r = prob.residuals(theta);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::MatrixXd jac(r.size(), 3);
    for (int k = 0; k < 3; ++k) {
      const double h = 1e-7;
      Eigen::Vector3d tp = theta, tm = theta;
      tp[k] += h;
      tm[k] -= h;
      jac.col(k) = (prob.residuals(tp) - prob.residuals(tm)) / (2 * h);
    }
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    const Eigen::Vector3d g = jac.transpose() * r;
    if (g.norm() < 1e-14 * (1.0 + cost) || cost < 1e-26 * static_cast<double>(r.size())) {
      return {theta, cost, it, true};
    }
    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::Matrix3d a = jtj;
      for (int k = 0; k < 3; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-12);
      const Eigen::Vector3d step = a.ldlt().solve(-g);
      const Eigen::Vector3d next = theta + step;
      const Eigen::VectorXd rn = prob.residuals(next);
      const double next_cost = rn.squaredNorm();
      if (next_cost < cost) {
        const bool tiny = step.norm() < 1e-13 * (1.0 + theta.norm());
        const bool flat = cost - next_cost < 1e-15 * cost;
        theta = next;
        r = rn;
        cost = next_cost;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (tiny || flat) return {theta, cost, it, true};
        break;
      }
      lambda *= 10.0;
    }
    // No descent direction left at any damping: a (local) minimum.
    if (!accepted) return {theta, cost, it, true};
  }
  return {theta, cost, max_iterations, false};
}

}  // namespace

PtzFit solve_ptz(const Vector3d& position, std::span<const Correspondence> corrs, const ImageSize& size,
                 const std::optional<CameraParams>& init, const PtzOptions& options) {
  if (corrs.size() < 2) throw Error(ErrorCode::degenerate, "PTZ solve needs at least 2 correspondences");
  bool distinct = false;
  for (std::size_t i = 1; i < corrs.size() && !distinct; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if ((corrs[i].world - corrs[j].world).norm() > 1e-6) {
        distinct = true;
        break;
      }
    }
  }
  if (!distinct) throw Error(ErrorCode::degenerate, "PTZ correspondences share one world point");

  const PtzProblem prob{position, corrs, size, init ? init->k1 : options.k1};

  std::vector<Eigen::Vector3d> starts;
  if (init) {
    const PtzAngles a = ptz_angles(init->rotation);
    starts.emplace_back(std::log(init->focal), a.pan, a.tilt);
  } else {
    struct Candidate {
      double cost;
      Eigen::Vector3d theta;
    };
    std::vector<Candidate> grid;
    const double deg = std::numbers::pi / 180.0;
    for (int ip = -20; ip <= 20; ++ip) {
      for (int it = 0; it <= 26; ++it) {
        for (int iff = 0; iff <= 12; ++iff) {
          const Eigen::Vector3d theta(std::log(300.0) + iff * (std::log(12000.0) - std::log(300.0)) / 12.0,
                                      ip * 4.0 * deg, (-88.0 + it * 3.0) * deg);
          grid.push_back({prob.residuals(theta).squaredNorm(), theta});
        }
      }
    }
    std::stable_sort(grid.begin(), grid.end(), [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
    for (std::size_t i = 0; i < grid.size() && starts.size() < 3; ++i) starts.push_back(grid[i].theta);
  }

  std::optional<LmResult> best;
  for (const auto& s : starts) {
    LmResult r = levenberg_marquardt(prob, s, options.max_iterations);
    if (!r.converged) continue;
    if (!best || r.cost < best->cost) best = r;
  }
  if (!best) throw Error(ErrorCode::not_converged, "PTZ solve did not converge within the iteration budget");

  PtzFit fit;
  fit.camera = prob.camera(best->theta);
  fit.rms_residual_px = rms_reprojection_px(fit.camera, corrs);
  fit.iterations = best->iterations;
  return fit;
}

}  // namespace gsr
