#include <json.hpp>

#include "gsr/metrics.hpp"

namespace gsr {

namespace {

using nlohmann::ordered_json;

ordered_json config_json(const EvalConfig& c) {
  ordered_json j;
  j["tau"] = c.tau;
  j["similarity"] = c.mode == SimilarityMode::pitch ? "pitch" : "image_iou";
  j["role"] = c.flags.role;
  j["team"] = c.flags.team;
  j["jersey"] = c.flags.jersey;
  j["alpha_grid"] = c.alpha_grid;
  return j;
}

ordered_json scores_json(const EvalReport& r) {
  ordered_json per_alpha = ordered_json::array();
  for (const auto& s : r.per_alpha) {
    ordered_json a;
    a["alpha"] = s.alpha;
    a["DetA"] = s.det_a;
    a["AssA"] = s.ass_a;
    a["HOTA"] = s.hota;
    a["TP"] = s.tp;
    a["FN"] = s.fn;
    a["FP"] = s.fp;
    per_alpha.push_back(std::move(a));
  }
  ordered_json j;
  j["per_alpha"] = std::move(per_alpha);
  j["final_gs_hota"] = r.final_score;
  j["gt_detections"] = r.counts.gt_detections;
  j["pred_detections"] = r.counts.pred_detections;
  j["warnings"] = {{"missing_pitch_point", r.counts.warnings.missing_pitch},
                   {"missing_bbox", r.counts.warnings.missing_bbox}};
  return j;
}

ordered_json multi_json(const MultiEvalReport& report) {
  ordered_json doc;
  doc["config"] = config_json(report.aggregate.config);
  doc["config"]["aggregation"] = report.aggregation == Aggregation::pooled ? "pooled" : "averaged";
  const ordered_json agg = scores_json(report.aggregate);
  for (const auto& [k, v] : agg.items()) doc[k] = v;
  ordered_json per_seq = ordered_json::object();
  for (const auto& s : report.per_sequence) per_seq[s.name] = scores_json(s.report);
  doc["per_sequence"] = std::move(per_seq);
  return doc;
}

}  // namespace

std::string report_to_json(const MultiEvalReport& report) { return multi_json(report).dump(2) + "\n"; }

std::string sweep_to_json(const std::vector<std::pair<double, MultiEvalReport>>& sweep) {
  ordered_json doc;
  ordered_json curve = ordered_json::array();
  ordered_json reports = ordered_json::array();
  for (const auto& [tau, r] : sweep) {
    curve.push_back({{"tau", tau}, {"final_gs_hota", r.aggregate.final_score}});
    reports.push_back(multi_json(r));
  }
  doc["curve"] = std::move(curve);
  doc["reports"] = std::move(reports);
  return doc.dump(2) + "\n";
}

}  // namespace gsr
