#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gsr/types.hpp"

namespace gsr {

struct ImageSize {
  int width = 1920;
  int height = 1080;

  Eigen::Vector2d center() const { return {width / 2.0, height / 2.0}; }
  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= 0 && p.y() >= 0 && p.x() <= width && p.y() <= height;
  }
};

// Maps homogeneous pitch-plane points (X, Y, 1), meters, to homogeneous image
// points, pixels. Stored with m(2, 2) == 1 whenever that entry is nonzero.
struct Homography {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

  static Homography normalized(const Eigen::Matrix3d& raw);
  Eigen::Vector2d apply(const Eigen::Vector2d& pitch) const;
};

// Pinhole camera with one radial coefficient applied in normalized image
// coordinates: x_d = x_u * (1 + k1 * r^2). `rotation` maps world directions
// into the camera frame (x right, y down, z forward).
struct CameraParams {
  double focal = 1000.0;
  Eigen::Vector2d principal_point{960.0, 540.0};
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d position{0.0, 0.0, -10.0};
  double k1 = 0.0;

  Eigen::Matrix3d intrinsics() const;
  Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const { return rotation * (world - position); }
};

// Zero-roll broadcast parameterization. tilt = 0 looks straight down with
// +X to the image right; tilt = -90 degrees looks horizontally towards the far
// side line. Positive pan turns the view towards +X. Angles in radians.
struct PtzAngles {
  double pan = 0.0;
  double tilt = 0.0;
  double roll = 0.0;
};

Eigen::Matrix3d ptz_rotation(const PtzAngles& angles);
PtzAngles ptz_angles(const Eigen::Matrix3d& rotation);
CameraParams camera_from_ptz(const Eigen::Vector3d& position, const PtzAngles& angles, double focal,
                             const ImageSize& size, double k1 = 0.0);
CameraParams look_at(const Eigen::Vector3d& position, const Eigen::Vector3d& target, double focal,
                     const ImageSize& size, double k1 = 0.0);

// K * [r1 r2 t] for the Z = 0 plane, ignoring distortion.
Homography compose_homography(const CameraParams& cam);

Eigen::Vector2d distort(const Eigen::Vector2d& undistorted, double k1);
// Inverse of distort by Newton iteration on the radius (at most 20 steps,
// 1e-12 tolerance).
Eigen::Vector2d undistort(const Eigen::Vector2d& distorted, double k1);

// Throws Error(invalid_argument) for points at or behind the camera plane, or
// past the radius where a negative k1 stops being monotone.
Eigen::Vector2d project(const CameraParams& cam, const Eigen::Vector3d& world);
std::optional<Eigen::Vector2d> try_project(const CameraParams& cam, const Eigen::Vector3d& world);

// Intersection of the back-projected pixel ray with Z = 0. Throws
// Error(no_solution) when the ray is parallel to the pitch or hits it behind
// the camera.
PitchPoint unproject_to_pitch(const CameraParams& cam, const Eigen::Vector2d& pixel);
PitchPoint unproject_to_pitch(const Homography& h, const Eigen::Vector2d& pixel);

PitchPoint bbox_bottom_to_pitch(const CameraParams& cam, const BBox& box);
PitchPoint bbox_bottom_to_pitch(const Homography& h, const BBox& box);

struct Correspondence {
  Eigen::Vector3d world;
  Eigen::Vector2d image;
  std::string keypoint;
};

struct HomographyFit {
  Homography homography;
  // Mean |A h| over the normalized DLT rows.
  double mean_algebraic_residual = 0.0;
  double mean_reprojection_px = 0.0;
};

// Normalized DLT over the X, Y components of the world points (callers pass
// ground points). Throws Error(invalid_argument) for < 4 correspondences and
// Error(degenerate) for collinear or coincident configurations.
HomographyFit estimate_homography(std::span<const Correspondence> corrs);

// Zero skew, square pixels, principal point at the image center. Returns the
// above-pitch solution with k1 = 0. Throws Error(degenerate) for rank-deficient
// input and Error(no_solution) when no real focal length exists.
CameraParams homography_to_camera(const Homography& h, const ImageSize& size);

using Polyline = std::vector<Eigen::Vector2d>;

inline constexpr double kMaxRadialCoefficient = 0.5;

// k1 in [-0.5, 0.5] minimizing the squared deviation of undistorted polyline
// points from their best-fit lines. Polylines with fewer than 5 points are
// skipped; throws Error(invalid_argument) when none remain.
double fit_radial_distortion(std::span<const Polyline> polylines, const CameraParams& cam);

// Componentwise median; the mean of the middle pair for even counts.
Eigen::Vector3d median_camera_position(std::span<const CameraParams> cams);

struct PtzFit {
  CameraParams camera;
  double rms_residual_px = 0.0;
  int iterations = 0;
};

struct PtzOptions {
  int max_iterations = 200;
  double k1 = 0.0;
};

// Least-squares (focal, pan, tilt) at a fixed position under zero roll.
// Starts from `init` when given, else from a coarse (pan, tilt, log focal)
// grid. Throws Error(degenerate) for < 2 distinct world points and
// Error(not_converged) when the iteration budget runs out.
PtzFit solve_ptz(const Eigen::Vector3d& position, std::span<const Correspondence> corrs, const ImageSize& size,
                 const std::optional<CameraParams>& init = std::nullopt, const PtzOptions& options = {});

double rms_reprojection_px(const CameraParams& cam, std::span<const Correspondence> corrs);

}  // namespace gsr
