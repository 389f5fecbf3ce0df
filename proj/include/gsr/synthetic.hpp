#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gsr/annotations.hpp"
#include "gsr/camera.hpp"
#include "gsr/metrics.hpp"
#include "gsr/types.hpp"

namespace gsr {

// Broadcast camera at a fixed position sweeping a ground target left and
// right, zooming in and out in step with the sweep.
struct CameraPathConfig {
  Eigen::Vector3d position{0.0, 55.0, -18.0};
  double target_y = 5.0;
  double sweep_x = 30.0;        // amplitude of the look-at target, meters
  double sweep_period_s = 14.0;
  double focal_min = 1150.0;
  double focal_max = 1400.0;
  double zoom_period_s = 9.0;
  double k1 = 0.0;
};

struct SimConfig {
  std::uint64_t seed = 1;
  std::string name = "SYN-001";
  int n_frames = 750;
  double frame_rate = 25.0;
  int players_per_team = 10;
  int goalkeepers_per_team = 1;
  int referees = 3;
  int others = 0;
  bool jerseys = true;
  double max_speed = 7.0;          // m/s
  double waypoint_interval_s = 3.0;
  double smoothing = 0.15;         // velocity low-pass gain per frame, (0, 1]
  int image_width = 1920;
  int image_height = 1080;
  int polyline_points = 10;
  double athlete_height = 1.8;
  CameraPathConfig camera;

  // Throws Error(invalid_argument) for impossible settings.
  void validate() const;
};

struct SyntheticSequence {
  // Every athlete in every frame; bbox_image only while visible.
  GameState full;
  std::vector<CameraParams> cameras;  // index = frame - 1
  // Visible athletes and in-frame pitch markings only.
  SequenceRecord record;
};

SyntheticSequence generate_ground_truth(const SimConfig& config);

struct PerturbConfig {
  std::uint64_t seed = 7;
  double drop_probability = 0.0;
  double clutter_rate = 0.0;  // mean false positives per frame
  double noise_sigma = 0.0;   // meters, per axis
  double role_flip = 0.0;
  double team_flip = 0.0;
  double jersey_flip = 0.0;
  double id_switch = 0.0;     // per track per frame
  // Scale of a per-frame projective warp applied to pitch points.
  double calibration_jitter = 0.0;

  void validate() const;
};

GameState perturb_predictions(const GameState& gt, const PerturbConfig& config);

// Swaps left and right on every detection that carries a team.
GameState swap_teams(const GameState& state);

struct ReferenceBounds {
  int max_tracks = 3;
  int max_frames = 4;
  int max_detections_per_frame = 3;
};

// Exhaustive GS-HOTA over all per-frame matchings. Throws
// Error(invalid_argument) when the instance exceeds the bounds.
EvalReport reference_eval(const GameState& gt, const GameState& pred, const EvalConfig& config,
                          const ReferenceBounds& bounds = {});

// Flat "key = value" files. '#' starts a comment. Keys prefixed with
// "perturb." configure the perturbation.
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::string_view text);
void apply_key_values(const KeyValues& kv, SimConfig& sim, PerturbConfig& perturb);

}  // namespace gsr
