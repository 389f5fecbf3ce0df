#include <cmath>

#include <Eigen/Dense>

#include "gsr/camera.hpp"
#include "gsr/error.hpp"

namespace gsr {

using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

// Similarity moving the centroid to the origin with mean distance sqrt(2).
Matrix3d normalizing_transform(const std::vector<Vector2d>& pts) {
  Vector2d c = Vector2d::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  double mean = 0;
  for (const auto& p : pts) mean += (p - c).norm();
  mean /= static_cast<double>(pts.size());
  const double s = mean > 0 ? std::sqrt(2.0) / mean : 1.0;
  Matrix3d t;
  t << s, 0, -s * c.x(), 0, s, -s * c.y(), 0, 0, 1;
  return t;
}

Vector2d apply(const Matrix3d& t, const Vector2d& p) {
  const Vector3d q = t * Vector3d(p.x(), p.y(), 1.0);
  return q.head<2>() / q.z();
}

}  // namespace

HomographyFit estimate_homography(std::span<const Correspondence> corrs) {
  if (corrs.size() < 4) throw Error(ErrorCode::invalid_argument, "homography needs at least 4 correspondences");
  const std::size_t n = corrs.size();
  std::vector<Vector2d> world(n), image(n);
  for (std::size_t i = 0; i < n; ++i) {
    world[i] = corrs[i].world.head<2>();
    image[i] = corrs[i].image;
  }

  const Matrix3d tw = normalizing_transform(world);
  const Matrix3d ti = normalizing_transform(image);

  // Collinear or coincident world points leave the plane map undetermined.
  Eigen::MatrixXd spread(2, n);
  for (std::size_t i = 0; i < n; ++i) spread.col(i) = apply(tw, world[i]);
  const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::MatrixXd>(spread).singularValues();
  if (sv[1] < 1e-9 * std::max(sv[0], 1e-300)) {
    throw Error(ErrorCode::degenerate, "world points are collinear or coincident");
  }

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector2d w = apply(tw, world[i]);
    const Vector2d m = apply(ti, image[i]);
    const double x = w.x(), y = w.y(), u = m.x(), v = m.y();
    a.row(2 * i) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    a.row(2 * i + 1) << x, y, 1, 0, 0, 0, -u * x, -u * y, -u;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd s = svd.singularValues();
  // Second-smallest singular value (the smallest may be implicit for n = 4).
  const double second = s[7];
  if (second < 1e-10 * s[0]) throw Error(ErrorCode::degenerate, "degenerate homography configuration");

  const Eigen::VectorXd h = svd.matrixV().col(8);
  Matrix3d hn;
  hn << h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8];
  const Matrix3d raw = ti.inverse() * hn * tw;
  if (std::abs(raw.determinant()) < 1e-300) throw Error(ErrorCode::degenerate, "estimated homography is singular");

  HomographyFit fit;
  fit.homography = Homography::normalized(raw);
  fit.mean_algebraic_residual = (a * h).cwiseAbs().sum() / static_cast<double>(2 * n);
  double reproj = 0;
  for (std::size_t i = 0; i < n; ++i) reproj += (fit.homography.apply(world[i]) - image[i]).norm();
  fit.mean_reprojection_px = reproj / static_cast<double>(n);
  return fit;
}

CameraParams homography_to_camera(const Homography& h, const ImageSize& size) {
  const Eigen::Vector3d hs = Eigen::JacobiSVD<Matrix3d>(h.m).singularValues();
  if (!(hs[2] > 1e-12 * hs[0])) throw Error(ErrorCode::degenerate, "homography is rank deficient");

  const Vector2d c = size.center();
  Matrix3d shift;
  shift << 1, 0, -c.x(), 0, 1, -c.y(), 0, 0, 1;
  Matrix3d m = shift * h.m;
  m /= m.norm();

  // r1 . r2 = 0 and |r1| = |r2| give two linear equations in w = 1/f^2.
  const double a1 = m(0, 0) * m(0, 1) + m(1, 0) * m(1, 1);
  const double b1 = m(2, 0) * m(2, 1);
  const double a2 = (m(0, 0) * m(0, 0) + m(1, 0) * m(1, 0)) - (m(0, 1) * m(0, 1) + m(1, 1) * m(1, 1));
  const double b2 = m(2, 0) * m(2, 0) - m(2, 1) * m(2, 1);
  const double denom = a1 * a1 + a2 * a2;
  if (!(denom > 1e-30)) throw Error(ErrorCode::no_solution, "focal length is unobservable from this homography");
  const double w = -(a1 * b1 + a2 * b2) / denom;
  if (!(w > 0) || !std::isfinite(w)) throw Error(ErrorCode::no_solution, "no real focal length solution");
  const double f = 1.0 / std::sqrt(w);

  Matrix3d kinv_m = m;
  kinv_m.row(0) /= f;
  kinv_m.row(1) /= f;
  const double lambda = 0.5 * (kinv_m.col(0).norm() + kinv_m.col(1).norm());
  Vector3d r1 = kinv_m.col(0) / lambda;
  Vector3d r2 = kinv_m.col(1) / lambda;
  Vector3d t = kinv_m.col(2) / lambda;

  const auto build = [&](const Vector3d& c1, const Vector3d& c2) {
    Matrix3d r;
    r.col(0) = c1;
    r.col(1) = c2;
    r.col(2) = c1.cross(c2);
    Eigen::JacobiSVD<Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix3d ortho = svd.matrixU() * svd.matrixV().transpose();
    if (ortho.determinant() < 0) {
      Matrix3d u = svd.matrixU();
      u.col(2) = -u.col(2);
      ortho = u * svd.matrixV().transpose();
    }
    return ortho;
  };

  Matrix3d rot = build(r1, r2);
  Vector3d pos = -rot.transpose() * t;
  if (pos.z() > 0) {
    // Mirrored solution below the pitch; flip the overall sign.
    rot = build(-r1, -r2);
    t = -t;
    pos = -rot.transpose() * t;
  }

  CameraParams cam;
  cam.focal = f;
  cam.principal_point = c;
  cam.rotation = rot;
  cam.position = pos;
  cam.k1 = 0.0;
  return cam;
}

}  // namespace gsr
