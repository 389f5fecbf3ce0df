#include <map>

#include "gsr/assignment.hpp"
#include "gsr/error.hpp"
#include "gsr/metrics.hpp"

namespace gsr {

namespace {

inline constexpr double kMotaIou = 0.5;
// Large enough to dominate any IoU sum.
inline constexpr double kContinuationBonus = 1000.0;

void require_boxes(const std::vector<Detection>& dets, const char* side, int frame) {
  for (const auto& d : dets) {
    if (!d.bbox_image) {
      throw Error(ErrorCode::invalid_argument, std::string(side) + " detection of track " + std::to_string(d.track_id) +
                                                   " in frame " + std::to_string(frame) + " has no bbox");
    }
  }
}

}  // namespace

MotaResult compute_mota(const GameState& gt, const GameState& pred) {
  MotaResult r;
  std::map<TrackId, TrackId> last_match;      // ever
  std::map<TrackId, TrackId> previous_frame;  // previous frame only
  const int n = std::max(gt.num_frames(), pred.num_frames());
  static const std::vector<Detection> none;
  for (int f = 1; f <= n; ++f) {
    const auto& g = f <= gt.num_frames() ? gt.frame(f) : none;
    const auto& p = f <= pred.num_frames() ? pred.frame(f) : none;
    require_boxes(g, "ground-truth", f);
    require_boxes(p, "predicted", f);
    r.gt += static_cast<std::int64_t>(g.size());

    Eigen::MatrixXd score(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(p.size()));
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> allowed(score.rows(), score.cols());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto prev = previous_frame.find(g[i].track_id);
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double v = iou(*g[i].bbox_image, *p[j].bbox_image);
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        allowed(ii, jj) = v >= kMotaIou;
        score(ii, jj) = v + (prev != previous_frame.end() && prev->second == p[j].track_id ? kContinuationBonus : 0.0);
      }
    }
    const auto matches = max_weight_assignment(score, allowed);
    previous_frame.clear();
    for (const auto& [i, j] : matches) {
      const TrackId gid = g[static_cast<std::size_t>(i)].track_id;
      const TrackId pid = p[static_cast<std::size_t>(j)].track_id;
      const auto last = last_match.find(gid);
      if (last != last_match.end() && last->second != pid) ++r.idsw;
      last_match[gid] = pid;
      previous_frame[gid] = pid;
    }
    r.matches += static_cast<std::int64_t>(matches.size());
    r.fn += static_cast<std::int64_t>(g.size() - matches.size());
    r.fp += static_cast<std::int64_t>(p.size() - matches.size());
  }
  // No GT at all: score only the false positives.
  const double denom = r.gt > 0 ? static_cast<double>(r.gt) : 1.0;
  r.mota = 1.0 - static_cast<double>(r.fn + r.fp + r.idsw) / denom;
  return r;
}

}  // namespace gsr
