#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "gsr/annotations.hpp"
#include "gsr/calibration.hpp"
#include "gsr/error.hpp"
#include "gsr/metrics.hpp"
#include "gsr/postprocess.hpp"
#include "gsr/predictions.hpp"
#include "gsr/render.hpp"
#include "gsr/synthetic.hpp"

namespace gsr::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool has_ext(const fs::path& p, const char* ext) { return p.extension() == ext; }

// Regular files of a directory (or the path itself), sorted by name.
std::vector<fs::path> input_files(const std::string& path, std::initializer_list<const char*> exts) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw Error(ErrorCode::io, path + ": file not found or unreadable");
  std::vector<fs::path> out;
  if (fs::is_directory(path, ec)) {
    for (const auto& e : fs::directory_iterator(path)) {
      if (!e.is_regular_file()) continue;
      for (const char* x : exts) {
        if (has_ext(e.path(), x)) out.push_back(e.path());
      }
    }
    std::sort(out.begin(), out.end());
  } else {
    out.emplace_back(path);
  }
  return out;
}

std::vector<SequenceRecord> load_gt(const std::string& path) {
  std::vector<SequenceRecord> out;
  std::map<std::string, fs::path> seen;
  for (const auto& f : input_files(path, {".json"})) {
    SequenceRecord r = load_sequence(f.string());
    if (auto it = seen.find(r.info.name); it != seen.end()) {
      throw Error(ErrorCode::schema, "sequence '" + r.info.name + "' appears in both " + it->second.string() + " and " + f.string());
    }
    seen[r.info.name] = f;
    out.push_back(std::move(r));
  }
  return out;
}

struct LoadedPredictions {
  std::map<std::string, GameState> states;
  std::map<std::string, std::map<std::pair<int, TrackId>, std::vector<double>>> embeddings;
};

LoadedPredictions load_pred(const std::string& path, std::ostream& err) {
  LoadedPredictions out;
  for (const auto& f : input_files(path, {".jsonl", ".json"})) {
    GameState state;
    std::map<std::pair<int, TrackId>, std::vector<double>> emb;
    if (has_ext(f, ".json")) {
      // Full annotation documents double as predictions.
      state = game_state_from_record(load_sequence(f.string()), {false});
    } else {
      ParsedPredictions p = load_predictions(f.string());
      for (const auto& w : p.warnings) err << f.string() << ": warning: " << w << "\n";
      state = std::move(p.state);
      emb = std::move(p.embeddings);
    }
    if (out.states.count(state.sequence)) {
      throw Error(ErrorCode::schema, "predictions for sequence '" + state.sequence + "' are split across files");
    }
    out.embeddings[state.sequence] = std::move(emb);
    out.states[state.sequence] = std::move(state);
  }
  return out;
}

struct EvalFlags {
  std::string gt, pred, report;
  double tau = 5.0;
  bool no_role = false, no_team = false, no_jersey = false, image_space = false, average = false, mota = false;
  double alpha_step = 0.05;
  unsigned threads = 0;
};

void add_eval_flags(CLI::App* cmd, EvalFlags& f, bool with_tau) {
  cmd->add_option("--gt", f.gt, "Ground-truth annotation file or directory of .json files")->required();
  cmd->add_option("--pred", f.pred, "Prediction file or directory (.jsonl records or .json annotation documents)")
      ->required();
  if (with_tau) cmd->add_option("--tau", f.tau, "Localization tolerance in meters")->capture_default_str();
  cmd->add_flag("--no-role", f.no_role, "Ignore the role attribute");
  cmd->add_flag("--no-team", f.no_team, "Ignore the team attribute");
  cmd->add_flag("--no-jersey", f.no_jersey, "Ignore the jersey attribute");
  cmd->add_flag("--image-space", f.image_space, "Use image-box IoU instead of pitch localization");
  cmd->add_option("--alpha-step", f.alpha_step, "Spacing of the alpha threshold grid")->capture_default_str();
  cmd->add_flag("--average", f.average, "Average per-sequence scores instead of pooling counts");
  cmd->add_option("--threads", f.threads, "Worker threads across sequences (0 = all cores)")->capture_default_str();
  cmd->add_option("--report", f.report, "Report output path")->required();
}

EvalConfig config_from(const EvalFlags& f) {
  if (!(f.tau > 0)) throw UsageError("--tau must be positive");
  if (!(f.alpha_step > 0 && f.alpha_step < 1)) throw UsageError("--alpha-step must lie in (0, 1)");
  EvalConfig c;
  c.tau = f.tau;
  c.alpha_grid = make_alpha_grid(f.alpha_step);
  c.mode = f.image_space ? SimilarityMode::image_iou : SimilarityMode::pitch;
  c.flags = {!f.no_role, !f.no_team, !f.no_jersey};
  return c;
}

std::vector<SequenceInput> pair_sequences(const EvalFlags& f, std::ostream& err) {
  const std::vector<SequenceRecord> gts = load_gt(f.gt);
  LoadedPredictions preds = load_pred(f.pred, err);
  const StateOptions opts{!f.image_space};
  std::vector<SequenceInput> out;
  for (const auto& g : gts) {
    SequenceInput in;
    in.name = g.info.name;
    in.gt = game_state_from_record(g, opts);
    auto it = preds.states.find(g.info.name);
    if (it == preds.states.end()) {
      err << "warning: no predictions for sequence '" << g.info.name << "'\n";
      in.pred.sequence = g.info.name;
    } else {
      in.pred = apply_exclusions(it->second, g, opts);
      preds.states.erase(it);
    }
    out.push_back(std::move(in));
  }
  for (const auto& [name, s] : preds.states) err << "warning: predictions for unknown sequence '" << name << "' ignored\n";
  if (out.empty()) throw Error(ErrorCode::io, f.gt + ": no ground-truth sequences found");
  return out;
}

int cmd_evaluate(const EvalFlags& f, std::ostream& err) {
  const EvalConfig config = config_from(f);
  const std::vector<SequenceInput> seqs = pair_sequences(f, err);
  MultiEvalOptions opts;
  opts.aggregation = f.average ? Aggregation::averaged : Aggregation::pooled;
  opts.threads = f.threads;
  const MultiEvalReport report = evaluate_sequences(seqs, config, opts);
  write_text_file(f.report, report_to_json(report));
  err << "GS-HOTA " << report.aggregate.final_score << " over " << seqs.size() << " sequence(s)\n";
  if (report.aggregate.counts.warnings.missing_pitch || report.aggregate.counts.warnings.missing_bbox) {
    err << "warning: " << report.aggregate.counts.warnings.missing_pitch << " pair(s) lacked a pitch point, "
        << report.aggregate.counts.warnings.missing_bbox << " lacked a box\n";
  }
  return kSuccess;
}

std::vector<double> parse_taus(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !(v > 0)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--taus: '" + item + "' is not a positive number");
    }
  }
  if (out.empty()) throw UsageError("--taus is empty");
  return out;
}

int cmd_sweep(const EvalFlags& f, const std::string& taus, std::ostream& err) {
  const EvalConfig config = config_from(f);
  const std::vector<double> tau_list = parse_taus(taus);
  const std::vector<SequenceInput> seqs = pair_sequences(f, err);
  MultiEvalOptions opts;
  opts.aggregation = f.average ? Aggregation::averaged : Aggregation::pooled;
  opts.threads = f.threads;
  const auto sweep = sweep_tolerance(seqs, tau_list, config, opts);
  write_text_file(f.report, sweep_to_json(sweep));
  for (const auto& [tau, r] : sweep) err << "tau " << tau << ": GS-HOTA " << r.aggregate.final_score << "\n";
  return kSuccess;
}

int cmd_calibrate(const std::string& gt, const std::string& out, double threshold, std::ostream& err) {
  if (!(threshold > 0)) throw UsageError("--threshold must be positive");
  const SequenceRecord seq = load_sequence(gt);
  CalibrationOptions opts;
  opts.residual_threshold_px = threshold;
  const auto frames = calibrate_sequence(seq, default_pitch(), opts);
  write_text_file(out, serialize_cameras(frames) + "\n");
  const auto ok = std::count_if(frames.begin(), frames.end(), [](const FrameCalibration& f) { return f.calibrated(); });
  err << "calibrated " << ok << " of " << frames.size() << " frames\n";
  return kSuccess;
}

int cmd_project(const std::string& gt, const std::string& cameras, const std::string& out, std::ostream& err) {
  const SequenceRecord seq = load_sequence(gt);
  const auto cams = parse_cameras(read_text_file(cameras));
  std::map<int, CameraParams> by_frame;
  for (const auto& c : cams)
    if (c.camera) by_frame[c.frame] = *c.camera;
  GameState state;
  state.sequence = seq.info.name;
  state.frames.resize(static_cast<std::size_t>(seq.info.seq_length));
  std::size_t projected = 0, skipped = 0;
  for (const auto& a : seq.athletes) {
    Detection d = a.detection;
    d.pitch_point.reset();
    auto it = by_frame.find(d.frame);
    if (it != by_frame.end() && d.bbox_image) {
      try {
        d.pitch_point = bbox_bottom_to_pitch(it->second, *d.bbox_image);
      } catch (const Error&) {
      }
    }
    if (!d.pitch_point && !d.bbox_image) {
      ++skipped;
      continue;
    }
    if (d.pitch_point) ++projected;
    state.frame(d.frame).push_back(d);
  }
  for (auto& f : state.frames)
    std::sort(f.begin(), f.end(), [](const Detection& a, const Detection& b) { return a.track_id < b.track_id; });
  save_predictions(state, out);
  err << "projected " << projected << " boxes";
  if (skipped) err << ", skipped " << skipped;
  err << "\n";
  return kSuccess;
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed, int sequences,
                 const std::string& out_dir, std::ostream& err) {
  if (sequences < 1) throw UsageError("--sequences must be >= 1");
  SimConfig sim;
  PerturbConfig perturb;
  if (!config_path.empty()) apply_key_values(parse_key_values(read_text_file(config_path)), sim, perturb);
  if (seed) sim.seed = *seed;
  const fs::path root(out_dir);
  std::error_code ec;
  for (const char* sub : {"gt", "pred", "cameras"}) {
    fs::create_directories(root / sub, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create '" + (root / sub).string() + "': " + ec.message());
  }
  const std::string base = sim.name;
  for (int i = 0; i < sequences; ++i) {
    SimConfig s = sim;
    PerturbConfig p = perturb;
    s.seed = sim.seed + static_cast<std::uint64_t>(i);
    p.seed = perturb.seed + static_cast<std::uint64_t>(i);
    if (sequences > 1) {
      char suffix[16];
      std::snprintf(suffix, sizeof suffix, "-%03d", i + 1);
      s.name = base + suffix;
    }
    const SyntheticSequence syn = generate_ground_truth(s);
    save_sequence(syn.record, (root / "gt" / (s.name + ".json")).string());
    const GameState pred = perturb_predictions(game_state_from_record(syn.record, {false}), p);
    save_predictions(pred, (root / "pred" / (s.name + ".jsonl")).string());
    std::vector<FrameCalibration> cams;
    for (std::size_t f = 0; f < syn.cameras.size(); ++f) {
      cams.push_back({static_cast<int>(f) + 1, CalibrationMethod::homography, syn.cameras[f], 0.0, 0});
    }
    write_text_file((root / "cameras" / (s.name + ".json")).string(), serialize_cameras(cams) + "\n");
    err << "wrote " << s.name << " (" << s.n_frames << " frames, " << syn.record.athletes.size() << " boxes)\n";
  }
  return kSuccess;
}

GameState load_state(const std::string& path) {
  if (has_ext(path, ".json")) return game_state_from_record(load_sequence(path), {false});
  return load_predictions(path).state;
}

int cmd_render(const std::string& state_path, const std::string& overlay_path, const std::string& out_dir,
               const std::string& format, double scale, std::ostream& err) {
  if (format != "svg" && format != "ppm") throw UsageError("--format must be svg or ppm");
  if (!(scale > 0)) throw UsageError("--scale must be positive");
  const GameState state = load_state(state_path);
  std::optional<GameState> overlay;
  if (!overlay_path.empty()) overlay = load_state(overlay_path);
  RenderStyle style;
  style.scale = scale;
  const RenderStats stats = render_sequence(state, out_dir, format == "svg" ? RenderFormat::svg : RenderFormat::ppm,
                                            style, overlay ? &*overlay : nullptr);
  err << "rendered " << state.num_frames() << " frame(s), " << stats.markers << " markers";
  if (stats.clamped) err << ", " << stats.clamped << " clamped to the border";
  if (stats.skipped) err << ", " << stats.skipped << " without pitch point";
  err << "\n";
  return kSuccess;
}

int cmd_refine(const std::string& pred, const std::string& out, const RefineOptions& opts, std::ostream& err) {
  const ParsedPredictions p = load_predictions(pred);
  for (const auto& w : p.warnings) err << pred << ": warning: " << w << "\n";
  RefineSummary summary;
  const GameState refined = refine_predictions(p.state, p.embeddings, opts, &summary);
  write_text_file(out, serialize_predictions(refined, p.embeddings));
  err << "refined " << summary.tracklets << " tracklets";
  if (summary.teams_from_clustering) err << ", teams from " << summary.player_tracklets_clustered << " clustered players";
  err << "\n";
  return kSuccess;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::internal: return kInternal;
    default: return kInput;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimap tracking evaluation and pitch geometry toolkit", "gsr"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gsr 1.0.0");

  EvalFlags eval;
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against ground truth with GS-HOTA");
  add_eval_flags(evaluate, eval, true);

  EvalFlags sweep_flags;
  std::string taus = "0.5,1,2,5,10";
  auto* sweep = app.add_subcommand("sweep", "GS-HOTA as a function of the localization tolerance");
  add_eval_flags(sweep, sweep_flags, false);
  sweep->add_option("--taus", taus, "Comma-separated tolerances in meters")->capture_default_str();

  std::string cal_gt, cal_out;
  double threshold = 5.0;
  auto* calibrate = app.add_subcommand("calibrate", "Estimate per-frame cameras from pitch-line annotations");
  calibrate->add_option("--gt", cal_gt, "Annotation document")->required();
  calibrate->add_option("--out", cal_out, "Camera document output path")->required();
  calibrate->add_option("--threshold", threshold, "Reprojection RMS above which frames stay uncalibrated (px)")
      ->capture_default_str();

  std::string proj_gt, proj_cams, proj_out;
  auto* project = app.add_subcommand("project", "Map annotated boxes to pitch points through per-frame cameras");
  project->add_option("--gt", proj_gt, "Annotation document")->required();
  project->add_option("--cameras", proj_cams, "Camera document")->required();
  project->add_option("--out", proj_out, "Prediction records output path")->required();

  std::string sim_config, sim_out;
  std::optional<std::uint64_t> sim_seed;
  int sim_sequences = 1;
  auto* simulate = app.add_subcommand("simulate", "Generate synthetic ground truth, cameras and perturbed predictions");
  simulate->add_option("--config", sim_config, "Flat key = value configuration file");
  simulate->add_option("--seed", sim_seed, "Overrides the configured seed");
  simulate->add_option("--sequences", sim_sequences, "Number of sequences (seeds increase by one)")->capture_default_str();
  simulate->add_option("--out-dir", sim_out, "Output directory (gt/, pred/, cameras/)")->required();

  std::string render_state, render_overlay, render_out, render_format = "svg";
  double render_scale = 8.0;
  auto* render = app.add_subcommand("render", "Draw per-frame minimaps of a game state");
  render->add_option("--state", render_state, "Annotation document (.json) or prediction records (.jsonl)")->required();
  render->add_option("--overlay", render_overlay, "Predictions drawn on top of --state");
  render->add_option("--out-dir", render_out, "Output directory")->required();
  render->add_option("--format", render_format, "svg or ppm")->capture_default_str();
  render->add_option("--scale", render_scale, "Document units per meter")->capture_default_str();

  std::string refine_pred, refine_out;
  bool no_vote_roles = false, no_vote_jerseys = false, no_cluster = false;
  auto* refine = app.add_subcommand("refine", "Tracklet voting and team clustering over prediction records");
  refine->add_option("--pred", refine_pred, "Prediction records")->required();
  refine->add_option("--out", refine_out, "Refined prediction records output path")->required();
  refine->add_flag("--no-vote-roles", no_vote_roles, "Keep per-detection roles");
  refine->add_flag("--no-vote-jerseys", no_vote_jerseys, "Keep per-detection jerseys");
  refine->add_flag("--no-cluster", no_cluster, "Skip team clustering");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*evaluate) return cmd_evaluate(eval, err);
    if (*sweep) return cmd_sweep(sweep_flags, taus, err);
    if (*calibrate) return cmd_calibrate(cal_gt, cal_out, threshold, err);
    if (*project) return cmd_project(proj_gt, proj_cams, proj_out, err);
    if (*simulate) return cmd_simulate(sim_config, sim_seed, sim_sequences, sim_out, err);
    if (*render) return cmd_render(render_state, render_overlay, render_out, render_format, render_scale, err);
    if (*refine) return cmd_refine(refine_pred, refine_out, {!no_vote_roles, !no_vote_jerseys, !no_cluster}, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace gsr::cli
