#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gsr/types.hpp"

namespace gsr {

enum class SimilarityMode { pitch, image_iou };

struct AttributeFlags {
  bool role = true;
  bool team = true;
  bool jersey = true;

  bool operator==(const AttributeFlags&) const = default;
};

// Thresholds k * step for k = 1, 2, ... while k * step < 1.
std::vector<double> make_alpha_grid(double step);

struct EvalConfig {
  double tau = 5.0;
  std::vector<double> alpha_grid = make_alpha_grid(0.05);
  SimilarityMode mode = SimilarityMode::pitch;
  AttributeFlags flags;

  // Throws Error(invalid_argument) on tau <= 0 or a grid that is not
  // strictly increasing inside (0, 1).
  void validate() const;
};

// Floor value of the localization kernel at distance tau; pairs at or below
// it are never matched.
inline constexpr double kNeverMatch = 0.05;

double loc_sim(const PitchPoint& p, const PitchPoint& g, double tau);
// 1 when every enabled attribute present in `gt` matches `pred`. Team and
// jersey are ignored unless the GT role carries a team.
int id_sim(const Attributes& pred, const Attributes& gt, const AttributeFlags& flags);
double iou(const BBox& a, const BBox& b);

struct SimWarnings {
  std::int64_t missing_pitch = 0;
  std::int64_t missing_bbox = 0;

  SimWarnings& operator+=(const SimWarnings& o) {
    missing_pitch += o.missing_pitch;
    missing_bbox += o.missing_bbox;
    return *this;
  }
};

double gs_sim(const Detection& pred, const Detection& gt, const EvalConfig& config, SimWarnings* warnings = nullptr);

using SimMatrix = Eigen::MatrixXd;  // rows: GT detections, cols: predictions

// Max-weight one-to-one matching over pairs with sim > alpha. Returns
// (gt index, pred index) pairs sorted by GT index.
std::vector<std::pair<int, int>> match_frames_at_alpha(const SimMatrix& sim, const Eigen::MatrixXd& weights,
                                                       double alpha);

// Raw per-alpha tallies. Association scores are stored as a sum over true
// positives so that tallies from several sequences can be pooled.
struct HotaCounts {
  std::vector<double> alphas;
  std::vector<std::int64_t> tp, fn, fp;
  std::vector<double> ass_sum;
  std::int64_t gt_detections = 0;
  std::int64_t pred_detections = 0;
  SimWarnings warnings;

  void merge(const HotaCounts& other);
};

struct AlphaScore {
  double alpha = 0.0;
  double det_a = 0.0;
  double ass_a = 0.0;
  double hota = 0.0;
  std::int64_t tp = 0, fn = 0, fp = 0;
};

struct EvalReport {
  EvalConfig config;
  std::vector<AlphaScore> per_alpha;
  // Mean of per-alpha HOTA in percent.
  double final_score = 0.0;
  HotaCounts counts;
};

EvalReport report_from_counts(const HotaCounts& counts, const EvalConfig& config);

// sim(pred, gt) for one candidate pair.
using SimProvider = std::function<double(const Detection& pred, const Detection& gt)>;

// Two-pass HOTA: alignment weights from potential matches, then per-alpha
// matching. Throws Error(invalid_argument) if pred has frames beyond GT, and
// Error(internal) if the pass 1 / pass 2 cross-check fails.
HotaCounts hota_counts(const GameState& gt, const GameState& pred, const SimProvider& sim, const EvalConfig& config);
EvalReport compute_hota_family(const GameState& gt, const GameState& pred, const SimProvider& sim,
                               const EvalConfig& config);
EvalReport compute_gs_hota(const GameState& gt, const GameState& pred, const EvalConfig& config);

enum class Aggregation { pooled, averaged };

struct SequenceInput {
  std::string name;
  GameState gt;
  GameState pred;
};

struct MultiEvalOptions {
  Aggregation aggregation = Aggregation::pooled;
  // 0 selects the hardware concurrency.
  unsigned threads = 0;
};

struct SequenceReport {
  std::string name;
  EvalReport report;
};

struct MultiEvalReport {
  EvalReport aggregate;
  Aggregation aggregation = Aggregation::pooled;
  std::vector<SequenceReport> per_sequence;
};

MultiEvalReport evaluate_sequences(const std::vector<SequenceInput>& seqs, const EvalConfig& config,
                                   const MultiEvalOptions& options = {});

struct SweepPoint {
  double tau = 0.0;
  EvalReport report;
};

std::vector<SweepPoint> sweep_tolerance(const GameState& gt, const GameState& pred, const std::vector<double>& taus,
                                        const EvalConfig& config);
std::vector<std::pair<double, MultiEvalReport>> sweep_tolerance(const std::vector<SequenceInput>& seqs,
                                                                 const std::vector<double>& taus,
                                                                 const EvalConfig& config,
                                                                 const MultiEvalOptions& options = {});

struct MotaResult {
  double mota = 0.0;
  std::int64_t gt = 0, matches = 0, fn = 0, fp = 0, idsw = 0;
};

// CLEAR-MOT accuracy with IoU >= 0.5 matching and continuation of previous
// matches. Throws Error(invalid_argument) when any detection lacks a bbox.
MotaResult compute_mota(const GameState& gt, const GameState& pred);

std::string report_to_json(const MultiEvalReport& report);
std::string sweep_to_json(const std::vector<std::pair<double, MultiEvalReport>>& sweep);

}  // namespace gsr
