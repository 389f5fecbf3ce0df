#include <algorithm>
#include <cmath>

#include "gsr/assignment.hpp"
#include "gsr/error.hpp"
#include "gsr/metrics.hpp"

namespace gsr {

std::vector<double> make_alpha_grid(double step) {
  if (!(step > 0.0 && step < 1.0)) throw Error(ErrorCode::invalid_argument, "alpha step must lie in (0, 1)");
  std::vector<double> grid;
  for (int k = 1;; ++k) {
    const double a = k * step;
    if (a >= 1.0 - 1e-9) break;
    grid.push_back(a);
  }
  return grid;
}

void EvalConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::invalid_argument, "tau must be positive");
  if (alpha_grid.empty()) throw Error(ErrorCode::invalid_argument, "alpha grid is empty");
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    const double a = alpha_grid[i];
    if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::invalid_argument, "alpha values must lie in (0, 1)");
    if (i > 0 && !(a > alpha_grid[i - 1])) throw Error(ErrorCode::invalid_argument, "alpha grid must be strictly increasing");
  }
}

double loc_sim(const PitchPoint& p, const PitchPoint& g, double tau) {
  const double dx = p.x - g.x, dy = p.y - g.y;
  // pow keeps the tau boundary at exactly 0.05.
  return std::pow(kNeverMatch, (dx * dx + dy * dy) / (tau * tau));
}

int id_sim(const Attributes& pred, const Attributes& gt, const AttributeFlags& flags) {
  if (flags.role && pred.role != gt.role) return 0;
  if (!carries_team(gt.role)) return 1;
  if (flags.team && gt.team && pred.team != gt.team) return 0;
  if (flags.jersey && gt.jersey && pred.jersey != gt.jersey) return 0;
  return 1;
}

double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double gs_sim(const Detection& pred, const Detection& gt, const EvalConfig& config, SimWarnings* warnings) {
  if (config.mode == SimilarityMode::pitch) {
    if (!pred.pitch_point || !gt.pitch_point) {
      if (warnings) ++warnings->missing_pitch;
      return 0.0;
    }
    if (id_sim(pred.attributes, gt.attributes, config.flags) == 0) return 0.0;
    return loc_sim(*pred.pitch_point, *gt.pitch_point, config.tau);
  }
  if (!pred.bbox_image || !gt.bbox_image) {
    if (warnings) ++warnings->missing_bbox;
    return 0.0;
  }
  if (id_sim(pred.attributes, gt.attributes, config.flags) == 0) return 0.0;
  return iou(*pred.bbox_image, *gt.bbox_image);
}

std::vector<std::pair<int, int>> match_frames_at_alpha(const SimMatrix& sim, const Eigen::MatrixXd& weights,
                                                       double alpha) {
  const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> allowed = (sim.array() > alpha).matrix();
  return max_weight_assignment(weights.cwiseProduct(sim), allowed);
}

}  // namespace gsr
