#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsr/annotations.hpp"
#include "gsr/camera.hpp"
#include "gsr/pitch.hpp"

namespace gsr {

// Converts normalized polyline coordinates to pixels.
Polyline to_pixels(const NormalizedPolyline& poly, const ImageSize& size);

// Image-space intersections of annotated markings paired with template
// keypoints. Only intersections that land inside the frame are returned.
std::vector<Correspondence> marking_intersections(const PitchLines& lines, const ImageSize& size,
                                                  const PitchTemplate& pitch = default_pitch());

enum class CalibrationMethod { none, homography, ptz };

std::string_view to_string(CalibrationMethod m);

struct FrameCalibration {
  int frame = 0;
  CalibrationMethod method = CalibrationMethod::none;
  std::optional<CameraParams> camera;
  double residual_px = 0.0;
  std::size_t correspondences = 0;

  bool calibrated() const { return camera.has_value(); }
};

struct CalibrationOptions {
  // Frames whose reprojection RMS exceeds this stay uncalibrated.
  double residual_threshold_px = 5.0;
  // Correspondence sets spanning less world area than this are rejected.
  double min_world_area_m2 = 1.0;
  // Re-intersect undistorted polylines this many times once k1 is known.
  int distortion_refinements = 2;
};

// Four-step cascade: marking intersections; homography + pinhole + k1 on
// frames with enough ground correspondences; median camera position over those
// frames; fixed-position PTZ on the remaining frames with >= 2
// correspondences. One entry per frame 1..seq_length.
std::vector<FrameCalibration> calibrate_sequence(const SequenceRecord& seq,
                                                 const PitchTemplate& pitch = default_pitch(),
                                                 const CalibrationOptions& options = {});

std::string serialize_cameras(const std::vector<FrameCalibration>& frames);
std::vector<FrameCalibration> parse_cameras(std::string_view document);

}  // namespace gsr
