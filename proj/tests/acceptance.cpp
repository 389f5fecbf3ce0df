// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "gsr/annotations.hpp"
#include "gsr/calibration.hpp"
#include "gsr/camera.hpp"
#include "gsr/metrics.hpp"
#include "gsr/pitch.hpp"
#include "gsr/predictions.hpp"
#include "gsr/synthetic.hpp"

using namespace gsr;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

struct Outcome {
  bool ok = true;
  std::string failed;
  std::ostringstream detail;

  void check(bool cond, const std::string& what) {
    if (cond) return;
    failed += (ok ? "failed: " : "; ") + what;
    ok = false;
  }
};

int failures = 0;

void criterion(const char* name, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(secs < limit_s, "runtime " + std::to_string(secs) + " s over " + std::to_string(limit_s) + " s");
  if (!o.ok) ++failures;
  std::string text = o.detail.str();
  if (!o.ok) text = o.failed + " | " + text;
  std::printf("%s  %-22s %7.2f s  %s\n", o.ok ? "PASS" : "FAIL", name, secs, text.c_str());
  std::fflush(stdout);
}

const ImageSize kSize{1920, 1080};

CameraParams random_camera(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> px(-60, 60), py(40, 90), pz(-50, -8), tx(-45, 45), ty(-30, 30),
      lf(std::log(800.0), std::log(5000.0));
  const Vector3d pos(px(rng), py(rng), pz(rng));
  return look_at(pos, Vector3d(tx(rng), ty(rng), 0.0), std::exp(lf(rng)), kSize);
}

PerturbConfig detector_like(std::uint64_t seed) {
  PerturbConfig p;
  p.seed = seed;
  p.drop_probability = 0.1;
  p.clutter_rate = 1.0;
  p.noise_sigma = 1.0;
  p.role_flip = 0.05;
  p.team_flip = 0.1;
  p.jersey_flip = 0.2;
  p.id_switch = 0.002;
  return p;
}

GameState sim_state(std::uint64_t seed, int frames) {
  SimConfig c;
  c.seed = seed;
  c.n_frames = frames;
  c.name = "ACC-" + std::to_string(seed);
  return game_state_from_record(generate_ground_truth(c).record);
}

void formula_fixtures(Outcome& o) {
  o.check(loc_sim({0, 0}, {5, 0}, 5) == 0.05, "loc_sim(5, tau 5) == 0.05");
  const double s = loc_sim({0, 0}, {2.5, 0}, 5);
  o.check(std::abs(s - 0.472871) <= 1e-6, "loc_sim(2.5, tau 5) ~ 0.472871");
  const auto [g1, p1] = gsr::testing::single_offset_instance();
  const double single = compute_gs_hota(g1, p1, EvalConfig{}).final_score;
  // 47.3684 is 900/19 rounded to four places; the tolerance applies to the exact value.
  o.check(std::abs(single - 900.0 / 19.0) <= 1e-6 && std::abs(single - 47.3684) < 5e-5, "single offset 47.3684");
  const auto [g2, p2] = gsr::testing::id_switch_instance();
  const double sw = compute_gs_hota(g2, p2, EvalConfig{}).final_score;
  o.check(std::abs(sw - 70.7107) <= 1e-4, "id switch 70.7107");
  char buf[160];
  std::snprintf(buf, sizeof buf, "loc_sim=%.7f single=%.7f switch=%.7f", s, single, sw);
  o.detail << buf;
}

void oracle_equivalence(Outcome& o) {
  std::mt19937_64 rng(20240);
  double worst = 0;
  int runs = 0;
  for (int i = 0; i < 500; ++i) {
    const auto [gt, pred] = gsr::testing::random_small_instance(rng);
    for (const auto& flags : gsr::testing::flag_configurations()) {
      EvalConfig c;
      c.flags = flags;
      const EvalReport fast = compute_gs_hota(gt, pred, c);
      const EvalReport ref = reference_eval(gt, pred, c);
      worst = std::max(worst, std::abs(fast.final_score - ref.final_score));
      for (std::size_t a = 0; a < fast.per_alpha.size(); ++a) {
        worst = std::max(worst, 100.0 * std::abs(fast.per_alpha[a].hota - ref.per_alpha[a].hota));
      }
      ++runs;
    }
  }
  o.check(worst <= 1e-12, "max deviation <= 1e-12");
  o.detail << runs << " evaluations, max |diff| " << worst;
}

void ablation_subset(Outcome& o) {
  const std::vector<AttributeFlags> ablated{{false, true, true}, {true, false, true}, {true, true, false},
                                            {false, false, true}, {false, true, false}, {true, false, false},
                                            {false, false, false}};
  long comparisons = 0, violations = 0, pair_violations = 0;
  for (int s = 0; s < 50; ++s) {
    const GameState gt = sim_state(1000 + s, 150);
    const GameState pred = perturb_predictions(gt, detector_like(5000 + s));
    // Eligible pair sets: full flags give a subset of every ablation.
    for (int f = 1; f <= gt.num_frames(); ++f) {
      for (const auto& g : gt.frame(f))
        for (const auto& p : pred.frame(f)) {
          const double full = gs_sim(p, g, EvalConfig{});
          for (const auto& fl : ablated) {
            EvalConfig c;
            c.flags = fl;
            if (full > gs_sim(p, g, c)) ++pair_violations;
          }
        }
    }
    const EvalReport full = compute_gs_hota(gt, pred, EvalConfig{});
    for (const auto& fl : ablated) {
      EvalConfig c;
      c.flags = fl;
      const EvalReport r = compute_gs_hota(gt, pred, c);
      for (std::size_t a = 0; a < r.per_alpha.size(); ++a) {
        ++comparisons;
        if (full.per_alpha[a].tp > r.per_alpha[a].tp) ++violations;
      }
    }
  }
  o.check(pair_violations == 0, "eligible pairs under full flags are a subset");
  o.check(violations == 0, "per-alpha TP(full) <= TP(ablated)");
  o.detail << "50 sequences, " << comparisons << " per-alpha comparisons, " << violations << " TP violations, "
           << pair_violations << " pair violations";
}

void tolerance_sweep(Outcome& o) {
  const std::vector<double> taus{0.5, 1, 2, 5, 10};
  std::vector<SequenceInput> seqs;
  for (int s = 0; s < 4; ++s) {
    const GameState gt = sim_state(2000 + s, 750);
    PerturbConfig p;
    p.seed = 6000 + s;
    p.noise_sigma = 1.0;
    seqs.push_back({gt.sequence, gt, perturb_predictions(gt, p)});
  }
  const auto sweep = sweep_tolerance(seqs, taus, EvalConfig{});
  std::ostringstream curve;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const EvalReport& r = sweep[i].second.aggregate;
    curve << (i ? ", " : "") << sweep[i].first << ":" << r.final_score;
    if (i == 0) continue;
    const EvalReport& prev = sweep[i - 1].second.aggregate;
    o.check(r.final_score >= prev.final_score, "score nondecreasing at tau " + std::to_string(sweep[i].first));
    for (std::size_t a = 0; a < r.per_alpha.size(); ++a) {
      o.check(r.per_alpha[a].tp >= prev.per_alpha[a].tp, "TP nondecreasing at tau " + std::to_string(sweep[i].first));
    }
    // Per sequence too.
    for (std::size_t s = 0; s < seqs.size(); ++s) {
      const auto& cur = sweep[i].second.per_sequence[s].report;
      const auto& old = sweep[i - 1].second.per_sequence[s].report;
      for (std::size_t a = 0; a < cur.per_alpha.size(); ++a) {
        o.check(cur.per_alpha[a].tp >= old.per_alpha[a].tp, "per-sequence TP nondecreasing");
      }
    }
  }
  o.detail << "GS-HOTA by tau {" << curve.str() << "}";
}

void geometry(Outcome& o) {
  std::mt19937_64 rng(31);
  double dlt = 0, focal = 0, pos = 0, rot = 0, inv = 0;
  int dlt_frames = 0;
  for (int i = 0; i < 1000; ++i) {
    const CameraParams cam = random_camera(rng);
    const Homography h = compose_homography(cam);
    std::vector<Correspondence> c;
    for (const auto& k : default_pitch().keypoints()) {
      if (k.position.z() != 0) continue;
      const auto p = try_project(cam, k.position);
      if (p && kSize.contains(*p)) c.push_back({k.position, *p, k.name});
    }
    if (c.size() >= 6) {
      ++dlt_frames;
      const Homography fit = estimate_homography(c).homography;
      for (const auto& k : c) dlt = std::max(dlt, (fit.apply(k.world.head<2>()) - k.image).norm());
    }

    const CameraParams back = homography_to_camera(h, kSize);
    focal = std::max(focal, std::abs(back.focal / cam.focal - 1));
    pos = std::max(pos, (back.position - cam.position).norm());
    rot = std::max(rot, (back.rotation - cam.rotation).norm());

    std::uniform_real_distribution<double> ux(-52.5, 52.5), uy(-34, 34);
    for (int j = 0; j < 20; ++j) {
      const Vector3d w(ux(rng), uy(rng), 0);
      const auto p = try_project(cam, w);
      if (!p || !kSize.contains(*p)) continue;
      const PitchPoint q = unproject_to_pitch(cam, *p);
      inv = std::max(inv, std::hypot(q.x - w.x(), q.y - w.y()));
    }
  }
  o.check(dlt < 1e-8 && dlt_frames >= 500, "homography reprojection < 1e-8 px");
  o.check(focal < 1e-6 && pos < 1e-6 && rot < 1e-6, "homography_to_camera < 1e-6");
  o.check(inv < 1e-9, "project/unproject < 1e-9 m");

  // k1 from straight markings under a known pose.
  const CameraParams bent = look_at({0, 60, -25}, {-30, 0, 0}, 1300, kSize, -0.1);
  std::vector<Polyline> polys;
  for (LineClass lc : all_line_classes()) {
    if (is_circle(lc)) continue;
    Polyline poly;
    for (const auto& w : default_pitch().sample(lc, 0.5)) {
      if (w.z() != 0) continue;
      auto p = try_project(bent, w);
      if (p && kSize.contains(*p)) poly.push_back(*p);
    }
    if (poly.size() >= 5) polys.push_back(poly);
  }
  CameraParams guess = bent;
  guess.k1 = 0;
  const double k1 = fit_radial_distortion(polys, guess);
  o.check(std::abs(k1 + 0.1) <= 1e-3, "k1 = -0.1 within 1e-3");

  SimConfig sc;
  sc.seed = 77;
  const SyntheticSequence seq = generate_ground_truth(sc);
  const auto frames = calibrate_sequence(seq.record);
  int good = 0;
  for (const auto& f : frames) {
    if (f.calibrated() &&
        (f.camera->position - seq.cameras[static_cast<std::size_t>(f.frame - 1)].position).norm() < 0.5) {
      ++good;
    }
  }
  const double frac = static_cast<double>(good) / static_cast<double>(frames.size());
  o.check(frac >= 0.99, ">= 99% of frames within 0.5 m");
  char buf[256];
  std::snprintf(buf, sizeof buf, "dlt %.1e px (%d views), cam f %.1e pos %.1e rot %.1e, inverse %.1e m, k1 %.6f, calibrated %d/%zu",
                dlt, dlt_frames, focal, pos, rot, inv, k1, good, frames.size());
  o.detail << buf;
}

void schema_fidelity(Outcome& o) {
  const SequenceRecord seq = load_sequence(std::string(GSR_TEST_DATA) + "/annotated_sample.json");
  const auto findings = validate_sequence(seq);
  o.check(findings.empty(), "sample validates with zero findings");
  const AthleteAnnotation* player = nullptr;
  for (const auto& a : seq.athletes)
    if (a.detection.track_id == 1) player = &a;
  o.check(player != nullptr, "sample athlete present");
  if (player) {
    o.check(std::abs(*player->x_center - (1020 + 46.0 / 2)) < 1e-12, "x_center = 1020 + 46/2");
    o.check(std::abs(player->detection.bbox_image->center_x() - *player->x_center) < 1e-12, "x_center from box");
    const PitchBottom& b = *player->bbox_pitch;
    o.check(std::abs((b.left->x + b.right->x) / 2 - b.middle->x) < 1e-3 &&
                std::abs((b.left->y + b.right->y) / 2 - b.middle->y) < 1e-3,
            "bottom middle is the midpoint of the bottom corners");
  }
  o.check(serialize_sequence(parse_sequence(serialize_sequence(seq))) == serialize_sequence(seq),
          "sample round trip");
  int identical = 0;
  for (int i = 0; i < 100; ++i) {
    SimConfig c;
    c.seed = 300 + static_cast<std::uint64_t>(i);
    c.n_frames = 5 + i % 7;
    c.name = "RT-" + std::to_string(i);
    const SequenceRecord rec = generate_ground_truth(c).record;
    const std::string text = serialize_sequence(rec);
    const SequenceRecord back = parse_sequence(text);
    if (back == rec && serialize_sequence(back) == text) ++identical;
  }
  o.check(identical == 100, "100 generated round trips");
  o.detail << findings.size() << " findings, " << identical << "/100 round trips identical";
}

void end_to_end(Outcome& o) {
  SimConfig c;
  c.seed = 2024;
  c.players_per_team = 11;
  c.goalkeepers_per_team = 0;
  c.referees = 3;
  c.n_frames = 750;
  c.frame_rate = 25;
  const SyntheticSequence syn = generate_ground_truth(c);
  const GameState gt = game_state_from_record(syn.record);
  const GameState pred = perturb_predictions(gt, PerturbConfig{});
  const double perfect = compute_gs_hota(gt, pred, EvalConfig{}).final_score;
  const double swapped = compute_gs_hota(gt, swap_teams(pred), EvalConfig{}).final_score;
  o.check(perfect == 100.0, "zero-noise predictions score exactly 100");
  o.check(perfect - swapped >= 50.0, "team swap drops >= 50 points");
  o.detail << "tracks 25, detections " << gt.num_detections() << ", perfect " << perfect << ", swapped " << swapped;
}

void throughput(Outcome& o) {
  std::vector<SequenceInput> seqs;
  for (int s = 0; s < 20; ++s) {
    SimConfig c;
    c.seed = 4000 + static_cast<std::uint64_t>(s);
    c.name = "TP-" + std::to_string(s);
    c.players_per_team = 11;
    c.goalkeepers_per_team = 0;
    const SyntheticSequence syn = generate_ground_truth(c);
    GameState full = syn.full;  // every athlete in every frame, 25 per frame
    seqs.push_back({c.name, full, perturb_predictions(full, detector_like(8000 + static_cast<std::uint64_t>(s)))});
  }
  std::size_t dets = 0;
  for (const auto& s : seqs) dets += s.gt.num_detections();
  const auto t0 = std::chrono::steady_clock::now();
  MultiEvalOptions opts;
  opts.threads = 4;
  const MultiEvalReport r = evaluate_sequences(seqs, EvalConfig{}, opts);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(secs < 120.0, "evaluation under 120 s");
  o.check(r.aggregate.per_alpha.size() == 19, "19 thresholds");
  o.detail << "20 x 750 frames, " << dets << " GT detections, evaluation " << secs << " s (4 threads), GS-HOTA "
           << r.aggregate.final_score;
}

}  // namespace

int main() {
  criterion("formula-fixtures", 1.0, formula_fixtures);
  criterion("oracle-equivalence", 120.0, oracle_equivalence);
  criterion("ablation-subset", 60.0, ablation_subset);
  criterion("tolerance-sweep", 120.0, tolerance_sweep);
  criterion("geometry-round-trips", 180.0, geometry);
  criterion("schema-fidelity", 60.0, schema_fidelity);
  criterion("end-to-end", 120.0, end_to_end);
  criterion("throughput", 300.0, throughput);
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
