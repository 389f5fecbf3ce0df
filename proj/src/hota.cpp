#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "gsr/error.hpp"
#include "gsr/metrics.hpp"

namespace gsr {

namespace {

struct FrameData {
  std::vector<int> gt_ids;
  std::vector<int> pred_ids;
  SimMatrix sim;
};

std::map<TrackId, int> dense_ids(const GameState& s) {
  std::map<TrackId, int> ids;
  for (const auto& frame : s.frames)
    for (const auto& d : frame) ids.emplace(d.track_id, 0);
  int next = 0;
  for (auto& [id, idx] : ids) idx = next++;
  return ids;
}

HotaCounts empty_counts(const EvalConfig& config) {
  HotaCounts c;
  c.alphas = config.alpha_grid;
  const std::size_t n = config.alpha_grid.size();
  c.tp.assign(n, 0);
  c.fn.assign(n, 0);
  c.fp.assign(n, 0);
  c.ass_sum.assign(n, 0.0);
  return c;
}

}  // namespace

void HotaCounts::merge(const HotaCounts& other) {
  if (alphas.empty()) {
    *this = other;
    return;
  }
  if (other.alphas != alphas) throw Error(ErrorCode::internal, "cannot merge counts over different alpha grids");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    tp[i] += other.tp[i];
    fn[i] += other.fn[i];
    fp[i] += other.fp[i];
    ass_sum[i] += other.ass_sum[i];
  }
  gt_detections += other.gt_detections;
  pred_detections += other.pred_detections;
  warnings += other.warnings;
}

EvalReport report_from_counts(const HotaCounts& counts, const EvalConfig& config) {
  EvalReport r;
  r.config = config;
  r.counts = counts;
  double total = 0.0;
  for (std::size_t i = 0; i < counts.alphas.size(); ++i) {
    AlphaScore s;
    s.alpha = counts.alphas[i];
    s.tp = counts.tp[i];
    s.fn = counts.fn[i];
    s.fp = counts.fp[i];
    const std::int64_t denom = s.tp + s.fn + s.fp;
    if (denom == 0) {
      // Nothing to find and nothing predicted.
      s.det_a = s.ass_a = s.hota = 1.0;
    } else {
      s.det_a = static_cast<double>(s.tp) / static_cast<double>(denom);
      s.ass_a = s.tp > 0 ? counts.ass_sum[i] / static_cast<double>(s.tp) : 0.0;
      s.hota = std::sqrt(s.det_a * s.ass_a);
    }
    total += s.hota;
    r.per_alpha.push_back(s);
  }
  r.final_score = counts.alphas.empty() ? 0.0 : 100.0 * total / static_cast<double>(counts.alphas.size());
  return r;
}

HotaCounts hota_counts(const GameState& gt, const GameState& pred, const SimProvider& sim, const EvalConfig& config) {
  config.validate();
  for (int f = gt.num_frames() + 1; f <= pred.num_frames(); ++f) {
    if (!pred.frame(f).empty()) {
      throw Error(ErrorCode::invalid_argument, "predictions contain frame " + std::to_string(f) +
                                                   " beyond the ground-truth range of " +
                                                   std::to_string(gt.num_frames()) + " frames");
    }
  }
  HotaCounts counts = empty_counts(config);
  const std::map<TrackId, int> gt_ids = dense_ids(gt);
  const std::map<TrackId, int> pred_ids = dense_ids(pred);
  const std::size_t ng = gt_ids.size(), np = pred_ids.size();

  std::vector<FrameData> frames(static_cast<std::size_t>(gt.num_frames()));
  std::vector<int> gt_len(ng, 0), pred_len(np, 0);
  std::vector<int> potential(ng * np, 0);
  std::int64_t potential_total = 0;

  // Pass 1.
  for (int f = 1; f <= gt.num_frames(); ++f) {
    const auto& g = gt.frame(f);
    static const std::vector<Detection> none;
    const auto& p = f <= pred.num_frames() ? pred.frame(f) : none;
    FrameData& fd = frames[static_cast<std::size_t>(f - 1)];
    for (const auto& d : g) fd.gt_ids.push_back(gt_ids.at(d.track_id));
    for (const auto& d : p) fd.pred_ids.push_back(pred_ids.at(d.track_id));
    for (int id : fd.gt_ids) ++gt_len[static_cast<std::size_t>(id)];
    for (int id : fd.pred_ids) ++pred_len[static_cast<std::size_t>(id)];
    counts.gt_detections += static_cast<std::int64_t>(g.size());
    counts.pred_detections += static_cast<std::int64_t>(p.size());
    fd.sim.resize(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j < p.size(); ++j) {
        const double s = sim(p[j], g[i]);
        fd.sim(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
        if (s > kNeverMatch) {
          ++potential[static_cast<std::size_t>(fd.gt_ids[i]) * np + static_cast<std::size_t>(fd.pred_ids[j])];
          ++potential_total;
        }
      }
    }
  }

  // Pass 2.
  std::vector<std::vector<std::pair<int, int>>> previous(frames.size());
  std::vector<char> has_previous(frames.size(), 0);
  std::vector<int> co_matched(ng * np, 0);
  for (std::size_t a = 0; a < config.alpha_grid.size(); ++a) {
    const double alpha = config.alpha_grid[a];
    std::fill(co_matched.begin(), co_matched.end(), 0);
    std::int64_t eligible_total = 0;
    for (std::size_t f = 0; f < frames.size(); ++f) {
      const FrameData& fd = frames[f];
      const auto n_gt = static_cast<std::int64_t>(fd.gt_ids.size());
      const auto n_pred = static_cast<std::int64_t>(fd.pred_ids.size());
      if (a == 0) eligible_total += (fd.sim.array() > alpha).count();
      if (n_gt == 0 || n_pred == 0) {
        counts.fn[a] += n_gt;
        counts.fp[a] += n_pred;
        continue;
      }
      // A matching that stays feasible at a higher threshold stays optimal.
      bool reuse = has_previous[f] != 0;
      if (reuse) {
        for (const auto& [i, j] : previous[f]) reuse = reuse && fd.sim(i, j) > alpha;
      }
      if (!reuse) {
        Eigen::MatrixXd weights(fd.sim.rows(), fd.sim.cols());
        for (Eigen::Index i = 0; i < weights.rows(); ++i) {
          for (Eigen::Index j = 0; j < weights.cols(); ++j) {
            const std::size_t gi = static_cast<std::size_t>(fd.gt_ids[static_cast<std::size_t>(i)]);
            const std::size_t pj = static_cast<std::size_t>(fd.pred_ids[static_cast<std::size_t>(j)]);
            const double pm = potential[gi * np + pj];
            weights(i, j) = pm / (gt_len[gi] + pred_len[pj] - pm);
          }
        }
        previous[f] = match_frames_at_alpha(fd.sim, weights, alpha);
        has_previous[f] = 1;
      }
      const auto m = static_cast<std::int64_t>(previous[f].size());
      counts.tp[a] += m;
      counts.fn[a] += n_gt - m;
      counts.fp[a] += n_pred - m;
      for (const auto& [i, j] : previous[f]) {
        ++co_matched[static_cast<std::size_t>(fd.gt_ids[static_cast<std::size_t>(i)]) * np +
                     static_cast<std::size_t>(fd.pred_ids[static_cast<std::size_t>(j)])];
      }
    }
    if (a == 0) {
      const bool ok = std::abs(alpha - kNeverMatch) < 1e-12 ? eligible_total == potential_total
                      : alpha > kNeverMatch             ? eligible_total <= potential_total
                                                        : eligible_total >= potential_total;
      if (!ok) throw Error(ErrorCode::internal, "potential-match tallies disagree between passes");
    }
    double ass = 0.0;
    for (std::size_t g = 0; g < ng; ++g) {
      for (std::size_t p = 0; p < np; ++p) {
        const double c = co_matched[g * np + p];
        if (c > 0) ass += c * c / (gt_len[g] + pred_len[p] - c);
      }
    }
    counts.ass_sum[a] = ass;
  }
  return counts;
}

EvalReport compute_hota_family(const GameState& gt, const GameState& pred, const SimProvider& sim,
                               const EvalConfig& config) {
  return report_from_counts(hota_counts(gt, pred, sim, config), config);
}

namespace {

HotaCounts gs_counts(const GameState& gt, const GameState& pred, const EvalConfig& config) {
  SimWarnings warnings;
  HotaCounts c = hota_counts(
      gt, pred, [&](const Detection& p, const Detection& g) { return gs_sim(p, g, config, &warnings); }, config);
  c.warnings = warnings;
  return c;
}

}  // namespace

EvalReport compute_gs_hota(const GameState& gt, const GameState& pred, const EvalConfig& config) {
  return report_from_counts(gs_counts(gt, pred, config), config);
}

MultiEvalReport evaluate_sequences(const std::vector<SequenceInput>& seqs, const EvalConfig& config,
                                   const MultiEvalOptions& options) {
  config.validate();
  std::vector<HotaCounts> counts(seqs.size());
  std::vector<std::exception_ptr> errors(seqs.size());
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(seqs.size(), 1)));
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < seqs.size(); i = next++) {
      try {
        counts[i] = gs_counts(seqs[i].gt, seqs[i].pred, config);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  MultiEvalReport out;
  out.aggregation = options.aggregation;
  HotaCounts pooled;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    out.per_sequence.push_back({seqs[i].name, report_from_counts(counts[i], config)});
    pooled.merge(counts[i]);
  }
  if (seqs.empty()) pooled = empty_counts(config);
  out.aggregate = report_from_counts(pooled, config);

  if (options.aggregation == Aggregation::averaged && !seqs.empty()) {
    const double n = static_cast<double>(seqs.size());
    double final_score = 0.0;
    for (std::size_t a = 0; a < out.aggregate.per_alpha.size(); ++a) {
      AlphaScore& s = out.aggregate.per_alpha[a];
      s.det_a = s.ass_a = s.hota = 0.0;
      for (const auto& sr : out.per_sequence) {
        s.det_a += sr.report.per_alpha[a].det_a / n;
        s.ass_a += sr.report.per_alpha[a].ass_a / n;
        s.hota += sr.report.per_alpha[a].hota / n;
      }
    }
    for (const auto& sr : out.per_sequence) final_score += sr.report.final_score / n;
    out.aggregate.final_score = final_score;
  }
  return out;
}

std::vector<SweepPoint> sweep_tolerance(const GameState& gt, const GameState& pred, const std::vector<double>& taus,
                                        const EvalConfig& config) {
  std::vector<SweepPoint> out;
  for (double tau : taus) {
    EvalConfig c = config;
    c.tau = tau;
    out.push_back({tau, compute_gs_hota(gt, pred, c)});
  }
  return out;
}

std::vector<std::pair<double, MultiEvalReport>> sweep_tolerance(const std::vector<SequenceInput>& seqs,
                                                                 const std::vector<double>& taus,
                                                                 const EvalConfig& config,
                                                                 const MultiEvalOptions& options) {
  std::vector<std::pair<double, MultiEvalReport>> out;
  for (double tau : taus) {
    EvalConfig c = config;
    c.tau = tau;
    out.emplace_back(tau, evaluate_sequences(seqs, c, options));
  }
  return out;
}

}  // namespace gsr
