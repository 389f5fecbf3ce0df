#include "gsr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "gsr/error.hpp"
#include "gsr/pitch.hpp"

namespace gsr {

using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent generator per concern so that one stream's consumption never
// shifts another's.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag) { return std::mt19937_64(splitmix(seed ^ splitmix(tag))); }

enum StreamTag : std::uint64_t {
  kMotion = 1,
  kCamera = 2,
  kIdentity = 3,
  kDrop = 11,
  kClutter = 12,
  kNoise = 13,
  kAttributes = 14,
  kSwitch = 15,
  kJitter = 16,
};

struct Region {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  Vector2d clamp(const Vector2d& p) const { return {std::clamp(p.x(), x0, x1), std::clamp(p.y(), y0, y1)}; }
  Vector2d sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
    const double x = ux(rng);
    return {x, uy(rng)};
  }
};

struct Athlete {
  TrackId id;
  Attributes attributes;
  Region region;
  Vector2d pos;
  Vector2d vel = Vector2d::Zero();
  Vector2d waypoint;
  double timer = 0.0;
};

Region region_for(Role role, std::optional<Team> team) {
  const double L = pitch_dims::half_length, W = pitch_dims::half_width;
  switch (role) {
    case Role::player:
      return *team == Team::left ? Region{-L + 2, 25, -W + 1, W - 1} : Region{-25, L - 2, -W + 1, W - 1};
    case Role::goalkeeper:
      return *team == Team::left ? Region{-L + 0.5, -L + 12, -12, 12} : Region{L - 12, L - 0.5, -12, 12};
    case Role::referee:
      return {-45, 45, -W + 2, W - 2};
    case Role::other:
      break;
  }
  return {-40, 40, W - 2, W};
}

std::vector<Athlete> make_athletes(const SimConfig& c, std::mt19937_64& identity, std::mt19937_64& motion) {
  std::vector<Athlete> out;
  TrackId next = 1;
  for (Team team : {Team::left, Team::right}) {
    std::vector<int> numbers(99);
    std::iota(numbers.begin(), numbers.end(), 1);
    std::shuffle(numbers.begin(), numbers.end(), identity);
    std::size_t k = 0;
    const auto add = [&](Role role) {
      Athlete a;
      a.id = next++;
      a.attributes.role = role;
      a.attributes.team = team;
      if (c.jerseys) a.attributes.jersey = numbers[k++];
      out.push_back(a);
    };
    for (int i = 0; i < c.goalkeepers_per_team; ++i) add(Role::goalkeeper);
    for (int i = 0; i < c.players_per_team; ++i) add(Role::player);
  }
  for (int i = 0; i < c.referees; ++i) out.push_back({next++, {Role::referee, std::nullopt, std::nullopt}, {}, {}, {}, {}, 0.0});
  for (int i = 0; i < c.others; ++i) out.push_back({next++, {Role::other, std::nullopt, std::nullopt}, {}, {}, {}, {}, 0.0});
  for (auto& a : out) {
    a.region = region_for(a.attributes.role, a.attributes.team);
    a.pos = a.region.sample(motion);
    a.waypoint = a.region.sample(motion);
    a.timer = c.waypoint_interval_s;
  }
  return out;
}

void step(Athlete& a, const SimConfig& c, std::mt19937_64& motion) {
  const double dt = 1.0 / c.frame_rate;
  a.timer -= dt;
  if ((a.waypoint - a.pos).norm() < 0.5 || a.timer <= 0.0) {
    a.waypoint = a.region.sample(motion);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    a.timer = c.waypoint_interval_s * u(motion);
  }
  const Vector2d delta = a.waypoint - a.pos;
  const double dist = delta.norm();
  const Vector2d desired = dist > 1e-12 ? Vector2d(delta / dist * c.max_speed * std::min(1.0, dist / 5.0)) : Vector2d::Zero();
  a.vel += c.smoothing * (desired - a.vel);
  const double speed = a.vel.norm();
  if (speed > c.max_speed && speed > 0) a.vel *= c.max_speed / speed;
  a.pos = a.region.clamp(a.pos + a.vel * dt);
}

CameraParams camera_at(const SimConfig& c, int frame, double sweep_phase, double zoom_phase) {
  const double t = (frame - 1) / c.frame_rate;
  const CameraPathConfig& p = c.camera;
  const double x = p.sweep_x * std::sin(2 * M_PI * t / p.sweep_period_s + sweep_phase);
  const double mid = 0.5 * (p.focal_min + p.focal_max), amp = 0.5 * (p.focal_max - p.focal_min);
  const double focal = mid + amp * std::sin(2 * M_PI * t / p.zoom_period_s + zoom_phase);
  return look_at(p.position, Vector3d(x, p.target_y, 0.0), focal, {c.image_width, c.image_height}, p.k1);
}

std::optional<NormalizedPolyline> visible_polyline(const std::vector<Vector3d>& samples, const CameraParams& cam,
                                                   const ImageSize& size, int points, bool circle) {
  std::size_t best_start = 0, best_len = 0;
  std::size_t start = 0, len = 0;
  std::vector<Vector2d> img(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto p = try_project(cam, samples[i]);
    const bool ok = p && size.contains(*p);
    if (ok) {
      img[i] = *p;
      if (len == 0) start = i;
      ++len;
      if (len > best_len) {
        best_len = len;
        best_start = start;
      }
    } else {
      len = 0;
    }
  }
  const std::size_t min_len = circle ? 3 : 2;
  if (best_len < min_len) return std::nullopt;
  if ((img[best_start + best_len - 1] - img[best_start]).norm() < 8.0) return std::nullopt;
  const std::size_t n = std::min<std::size_t>(best_len, static_cast<std::size_t>(std::max(points, 3)));
  NormalizedPolyline poly;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = best_start + (n == 1 ? 0 : (k * (best_len - 1) + (n - 1) / 2) / (n - 1));
    poly.push_back({img[i].x() / size.width, img[i].y() / size.height});
  }
  return poly;
}

std::optional<BBox> athlete_box(const CameraParams& cam, const Vector2d& pos, double height, const ImageSize& size) {
  const auto foot = try_project(cam, Vector3d(pos.x(), pos.y(), 0.0));
  const auto head = try_project(cam, Vector3d(pos.x(), pos.y(), -height));
  if (!foot || !head || !size.contains(*foot)) return std::nullopt;
  const double h = foot->y() - head->y();
  if (!(h > 1.0)) return std::nullopt;
  const double w = 0.35 * h;
  return BBox{foot->x() - w / 2.0, foot->y() - h, w, h};
}

}  // namespace

void SimConfig::validate() const {
  const auto fail = [](const std::string& m) { throw Error(ErrorCode::invalid_argument, "simulation config: " + m); };
  if (n_frames < 1) fail("n_frames must be >= 1");
  if (!(frame_rate > 0)) fail("frame_rate must be positive");
  if (players_per_team < 0 || goalkeepers_per_team < 0 || referees < 0 || others < 0) fail("counts must be >= 0");
  if (jerseys && players_per_team + goalkeepers_per_team > 99) fail("more athletes per team than jersey numbers");
  if (!(max_speed >= 0)) fail("max_speed must be >= 0");
  if (!(waypoint_interval_s > 0)) fail("waypoint_interval_s must be positive");
  if (!(smoothing > 0 && smoothing <= 1)) fail("smoothing must lie in (0, 1]");
  if (image_width <= 0 || image_height <= 0) fail("image size must be positive");
  if (polyline_points < 3) fail("polyline_points must be >= 3");
  if (!(athlete_height > 0)) fail("athlete_height must be positive");
  if (!(camera.focal_min > 0) || camera.focal_max < camera.focal_min) fail("focal range is empty");
  if (!(camera.position.z() < 0)) fail("camera must be above the pitch (negative Z)");
  if (!(camera.sweep_period_s > 0) || !(camera.zoom_period_s > 0)) fail("camera periods must be positive");
  if (std::abs(camera.k1) > kMaxRadialCoefficient) fail("|k1| must not exceed 0.5");
}

SyntheticSequence generate_ground_truth(const SimConfig& config) {
  config.validate();
  std::mt19937_64 motion = stream(config.seed, kMotion);
  std::mt19937_64 camera_rng = stream(config.seed, kCamera);
  std::mt19937_64 identity = stream(config.seed, kIdentity);
  std::uniform_real_distribution<double> phase(0.0, 2 * M_PI);
  const double sweep_phase = phase(camera_rng);
  const double zoom_phase = phase(camera_rng);

  std::vector<Athlete> athletes = make_athletes(config, identity, motion);
  const ImageSize size{config.image_width, config.image_height};
  const PitchTemplate& pitch = default_pitch();
  std::vector<std::pair<LineClass, std::vector<Vector3d>>> samples;
  for (LineClass c : all_line_classes()) samples.emplace_back(c, pitch.sample(c, 0.25));

  SyntheticSequence out;
  out.full.sequence = config.name;
  out.full.frames.resize(static_cast<std::size_t>(config.n_frames));
  SequenceRecord& rec = out.record;
  rec.info.name = config.name;
  rec.info.seq_length = config.n_frames;
  rec.info.frame_rate = config.frame_rate;
  rec.info.im_dir = "img1";
  rec.info.im_ext = ".jpg";

  for (int f = 1; f <= config.n_frames; ++f) {
    if (f > 1)
      for (auto& a : athletes) step(a, config, motion);
    const CameraParams cam = camera_at(config, f, sweep_phase, zoom_phase);
    out.cameras.push_back(cam);

    char file_name[32];
    std::snprintf(file_name, sizeof file_name, "%06d.jpg", f);
    ImageInfo im;
    im.image_id = std::to_string(f);
    im.file_name = file_name;
    im.frame = f;
    im.width = config.image_width;
    im.height = config.image_height;
    rec.images.push_back(im);

    for (const auto& a : athletes) {
      Detection d;
      d.frame = f;
      d.track_id = a.id;
      d.attributes = a.attributes;
      d.pitch_point = PitchPoint{a.pos.x(), a.pos.y()};
      d.bbox_image = athlete_box(cam, a.pos, config.athlete_height, size);
      out.full.frame(f).push_back(d);
      if (!d.bbox_image) continue;

      AthleteAnnotation ann;
      ann.id = std::to_string(f) + "-" + std::to_string(a.id);
      ann.image_id = im.image_id;
      ann.detection = d;
      ann.x_center = d.bbox_image->center_x();
      ann.y_center = d.bbox_image->center_y();
      // Corners re-centered on the exact bottom middle so that the middle is
      // their midpoint.
      const BBox& b = *d.bbox_image;
      PitchBottom bottom;
      bottom.middle = d.pitch_point;
      try {
        const PitchPoint l = unproject_to_pitch(cam, Vector2d(b.x, b.bottom()));
        const PitchPoint r = unproject_to_pitch(cam, Vector2d(b.x + b.w, b.bottom()));
        const double hx = 0.5 * (r.x - l.x), hy = 0.5 * (r.y - l.y);
        bottom.left = PitchPoint{a.pos.x() - hx, a.pos.y() - hy};
        bottom.right = PitchPoint{a.pos.x() + hx, a.pos.y() + hy};
      } catch (const Error&) {
      }
      ann.bbox_pitch = bottom;
      rec.athletes.push_back(std::move(ann));
    }

    PitchAnnotation pa;
    pa.id = "pitch-" + std::to_string(f);
    pa.image_id = im.image_id;
    pa.frame = f;
    for (const auto& [cls, pts] : samples) {
      if (auto poly = visible_polyline(pts, cam, size, config.polyline_points, is_circle(cls))) pa.lines[cls] = *poly;
    }
    rec.pitch.push_back(std::move(pa));
  }
  return out;
}

void PerturbConfig::validate() const {
  const auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::invalid_argument, std::string(name) + " must lie in [0, 1]");
  };
  prob(drop_probability, "drop_probability");
  prob(role_flip, "role_flip");
  prob(team_flip, "team_flip");
  prob(jersey_flip, "jersey_flip");
  prob(id_switch, "id_switch");
  if (!(clutter_rate >= 0)) throw Error(ErrorCode::invalid_argument, "clutter_rate must be >= 0");
  if (!(noise_sigma >= 0)) throw Error(ErrorCode::invalid_argument, "noise_sigma must be >= 0");
  if (!(calibration_jitter >= 0)) throw Error(ErrorCode::invalid_argument, "calibration_jitter must be >= 0");
}

GameState perturb_predictions(const GameState& gt, const PerturbConfig& config) {
  config.validate();
  std::mt19937_64 drop_rng = stream(config.seed, kDrop);
  std::mt19937_64 clutter_rng = stream(config.seed, kClutter);
  std::mt19937_64 noise_rng = stream(config.seed, kNoise);
  std::mt19937_64 attr_rng = stream(config.seed, kAttributes);
  std::mt19937_64 switch_rng = stream(config.seed, kSwitch);
  std::mt19937_64 jitter_rng = stream(config.seed, kJitter);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  TrackId next_id = 1;
  for (const auto& frame : gt.frames)
    for (const auto& d : frame) next_id = std::max(next_id, d.track_id + 1);

  std::map<TrackId, TrackId> identity;  // GT track -> predicted id
  GameState out;
  out.sequence = gt.sequence;
  out.frames.resize(gt.frames.size());
  for (std::size_t fi = 0; fi < gt.frames.size(); ++fi) {
    const int frame = static_cast<int>(fi) + 1;
    std::vector<Detection> dets;
    for (const auto& d : gt.frames[fi]) {
      if (config.drop_probability > 0 && u01(drop_rng) < config.drop_probability) continue;
      dets.push_back(d);
    }

    if (config.id_switch > 0) {
      for (std::size_t i = 0; i < dets.size() && dets.size() > 1; ++i) {
        if (u01(switch_rng) >= config.id_switch) continue;
        std::uniform_int_distribution<std::size_t> other(0, dets.size() - 2);
        std::size_t j = other(switch_rng);
        if (j >= i) ++j;
        const TrackId a = dets[i].track_id, b = dets[j].track_id;
        const TrackId ia = identity.count(a) ? identity[a] : a;
        const TrackId ib = identity.count(b) ? identity[b] : b;
        identity[a] = ib;
        identity[b] = ia;
      }
    }
    for (auto& d : dets) {
      if (auto it = identity.find(d.track_id); it != identity.end()) d.track_id = it->second;
    }

    if (config.noise_sigma > 0) {
      for (auto& d : dets) {
        if (!d.pitch_point) continue;
        const double dx = normal(noise_rng) * config.noise_sigma;
        const double dy = normal(noise_rng) * config.noise_sigma;
        d.pitch_point->x += dx;
        d.pitch_point->y += dy;
      }
    }

    if (config.calibration_jitter > 0) {
      const double s = config.calibration_jitter;
      Eigen::Matrix3d warp = Eigen::Matrix3d::Identity();
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) warp(r, c) += s * normal(jitter_rng);
      warp(0, 2) = 10.0 * s * normal(jitter_rng);
      warp(1, 2) = 10.0 * s * normal(jitter_rng);
      warp(2, 0) = s / 50.0 * normal(jitter_rng);
      warp(2, 1) = s / 50.0 * normal(jitter_rng);
      for (auto& d : dets) {
        if (!d.pitch_point) continue;
        const Vector3d q = warp * Vector3d(d.pitch_point->x, d.pitch_point->y, 1.0);
        if (std::abs(q.z()) < 1e-9) continue;
        d.pitch_point = PitchPoint{q.x() / q.z(), q.y() / q.z()};
      }
    }

    for (auto& d : dets) {
      Attributes& at = d.attributes;
      if (config.role_flip > 0 && u01(attr_rng) < config.role_flip) {
        std::uniform_int_distribution<int> pick(0, 2);
        int r = pick(attr_rng);
        if (r >= static_cast<int>(at.role)) ++r;
        at.role = static_cast<Role>(r);
        if (!carries_team(at.role)) {
          at.team.reset();
          at.jersey.reset();
        }
      }
      if (config.team_flip > 0 && at.team && u01(attr_rng) < config.team_flip) {
        at.team = *at.team == Team::left ? Team::right : Team::left;
      }
      if (config.jersey_flip > 0 && at.jersey && u01(attr_rng) < config.jersey_flip) {
        std::uniform_int_distribution<int> pick(1, 98);
        int j = pick(attr_rng);
        if (j >= *at.jersey) ++j;
        at.jersey = j;
      }
    }

    if (config.clutter_rate > 0) {
      std::poisson_distribution<int> count(config.clutter_rate);
      const int n = count(clutter_rng);
      std::uniform_real_distribution<double> ux(-pitch_dims::half_length, pitch_dims::half_length);
      std::uniform_real_distribution<double> uy(-pitch_dims::half_width, pitch_dims::half_width);
      std::uniform_real_distribution<double> ubx(0.0, 1860.0), uby(0.0, 930.0), uw(15.0, 60.0);
      for (int k = 0; k < n; ++k) {
        Detection d;
        d.frame = frame;
        d.track_id = next_id++;
        d.attributes = {Role::player, u01(clutter_rng) < 0.5 ? Team::left : Team::right, std::nullopt};
        const double x = ux(clutter_rng);
        d.pitch_point = PitchPoint{x, uy(clutter_rng)};
        const double bx = ubx(clutter_rng), by = uby(clutter_rng), w = uw(clutter_rng);
        d.bbox_image = BBox{bx, by, w, 2.5 * w};
        dets.push_back(d);
      }
    }

    for (auto& d : dets) d.frame = frame;
    std::sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) { return a.track_id < b.track_id; });
    out.frames[fi] = std::move(dets);
  }
  return out;
}

GameState swap_teams(const GameState& state) {
  GameState out = state;
  for (auto& frame : out.frames) {
    for (auto& d : frame) {
      if (d.attributes.team) d.attributes.team = *d.attributes.team == Team::left ? Team::right : Team::left;
    }
  }
  return out;
}

}  // namespace gsr
