#include <cmath>
#include <map>
#include <set>

#include "gsr/error.hpp"
#include "gsr/synthetic.hpp"

namespace gsr {

namespace {

struct Pair {
  int gt;    // index within the frame
  int pred;  // index within the frame
};

// Depth-first enumeration of every partial one-to-one matching of GT row `i`
// onwards.
void enumerate(int i, const std::vector<std::vector<double>>& weight, const std::vector<std::vector<bool>>& allowed,
               std::vector<bool>& used, std::vector<Pair>& current, double value, std::vector<Pair>& best,
               double& best_value) {
  const int rows = static_cast<int>(weight.size());
  if (i == rows) {
    if (value > best_value) {
      best_value = value;
      best = current;
    }
    return;
  }
  enumerate(i + 1, weight, allowed, used, current, value, best, best_value);
  for (std::size_t j = 0; j < used.size(); ++j) {
    if (used[j] || !allowed[static_cast<std::size_t>(i)][j]) continue;
    used[j] = true;
    current.push_back({i, static_cast<int>(j)});
    enumerate(i + 1, weight, allowed, used, current, value + weight[static_cast<std::size_t>(i)][j], best, best_value);
    current.pop_back();
    used[j] = false;
  }
}

void check_bounds(const GameState& s, const ReferenceBounds& b, const char* side) {
  std::set<TrackId> ids;
  for (const auto& f : s.frames) {
    if (static_cast<int>(f.size()) > b.max_detections_per_frame) {
      throw Error(ErrorCode::invalid_argument, std::string(side) + ": too many detections in one frame for exhaustive evaluation");
    }
    for (const auto& d : f) ids.insert(d.track_id);
  }
  if (static_cast<int>(ids.size()) > b.max_tracks) {
    throw Error(ErrorCode::invalid_argument, std::string(side) + ": too many tracks for exhaustive evaluation");
  }
}

}  // namespace

EvalReport reference_eval(const GameState& gt, const GameState& pred, const EvalConfig& config,
                          const ReferenceBounds& bounds) {
  config.validate();
  const int frames = std::max(gt.num_frames(), pred.num_frames());
  if (frames > bounds.max_frames) throw Error(ErrorCode::invalid_argument, "too many frames for exhaustive evaluation");
  check_bounds(gt, bounds, "ground truth");
  check_bounds(pred, bounds, "predictions");

  static const std::vector<Detection> none;
  const auto gt_frame = [&](int f) -> const std::vector<Detection>& { return f <= gt.num_frames() ? gt.frame(f) : none; };
  const auto pred_frame = [&](int f) -> const std::vector<Detection>& {
    return f <= pred.num_frames() ? pred.frame(f) : none;
  };

  // Similarities, track lengths and potential matches, counted directly.
  std::map<int, std::vector<std::vector<double>>> sim;
  std::map<TrackId, int> gt_len, pred_len;
  std::map<std::pair<TrackId, TrackId>, int> potential;
  for (int f = 1; f <= frames; ++f) {
    const auto& g = gt_frame(f);
    const auto& p = pred_frame(f);
    auto& s = sim[f];
    s.assign(g.size(), std::vector<double>(p.size(), 0.0));
    for (const auto& d : g) ++gt_len[d.track_id];
    for (const auto& d : p) ++pred_len[d.track_id];
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < p.size(); ++j) {
        s[i][j] = gs_sim(p[j], g[i], config);
        if (s[i][j] > kNeverMatch) ++potential[{g[i].track_id, p[j].track_id}];
      }
    }
  }
  const auto alignment = [&](TrackId g, TrackId p) {
    auto it = potential.find({g, p});
    const double pm = it == potential.end() ? 0.0 : it->second;
    return pm / (gt_len[g] + pred_len[p] - pm);
  };

  EvalReport report;
  report.config = config;
  double hota_total = 0.0;
  for (double alpha : config.alpha_grid) {
    std::int64_t tp = 0, fn = 0, fp = 0;
    std::map<std::pair<TrackId, TrackId>, int> co;
    std::vector<std::pair<TrackId, TrackId>> tp_pairs;
    for (int f = 1; f <= frames; ++f) {
      const auto& g = gt_frame(f);
      const auto& p = pred_frame(f);
      const auto& s = sim[f];
      std::vector<std::vector<double>> w(g.size(), std::vector<double>(p.size(), 0.0));
      std::vector<std::vector<bool>> ok(g.size(), std::vector<bool>(p.size(), false));
      for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < p.size(); ++j) {
          ok[i][j] = s[i][j] > alpha;
          w[i][j] = alignment(g[i].track_id, p[j].track_id) * s[i][j];
        }
      }
      std::vector<bool> used(p.size(), false);
      std::vector<Pair> current, best;
      double best_value = -1.0;
      enumerate(0, w, ok, used, current, 0.0, best, best_value);
      tp += static_cast<std::int64_t>(best.size());
      fn += static_cast<std::int64_t>(g.size() - best.size());
      fp += static_cast<std::int64_t>(p.size() - best.size());
      for (const auto& m : best) {
        const auto key = std::make_pair(g[static_cast<std::size_t>(m.gt)].track_id, p[static_cast<std::size_t>(m.pred)].track_id);
        ++co[key];
        tp_pairs.push_back(key);
      }
    }
    // Per true positive: TPA / (TPA + FNA + FPA).
    double ass = 0.0;
    for (const auto& key : tp_pairs) {
      const double tpa = co[key];
      const double fna = gt_len[key.first] - tpa;
      const double fpa = pred_len[key.second] - tpa;
      ass += tpa / (tpa + fna + fpa);
    }
    AlphaScore a;
    a.alpha = alpha;
    a.tp = tp;
    a.fn = fn;
    a.fp = fp;
    if (tp + fn + fp == 0) {
      a.det_a = a.ass_a = a.hota = 1.0;
    } else {
      a.det_a = static_cast<double>(tp) / static_cast<double>(tp + fn + fp);
      a.ass_a = tp > 0 ? ass / static_cast<double>(tp) : 0.0;
      a.hota = std::sqrt(a.det_a * a.ass_a);
    }
    hota_total += a.hota;
    report.per_alpha.push_back(a);
  }
  report.final_score = 100.0 * hota_total / static_cast<double>(config.alpha_grid.size());
  return report;
}

}  // namespace gsr
