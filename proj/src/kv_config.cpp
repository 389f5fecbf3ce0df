#include <charconv>
#include <functional>

#include "gsr/error.hpp"
#include "gsr/synthetic.hpp"

namespace gsr {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_argument, "config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw Error(ErrorCode::invalid_argument, "config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(ErrorCode::invalid_argument, "config key '" + key + "': expected a boolean, got '" + v + "'");
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string t = trim(line);
    if (t.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::parse, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw Error(ErrorCode::parse, "config line " + std::to_string(line_no) + ": empty key");
    out[key] = value;
    if (end == text.size()) break;
  }
  return out;
}

void apply_key_values(const KeyValues& kv, SimConfig& sim, PerturbConfig& perturb) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"seed", [&](auto& k, auto& v) { sim.seed = static_cast<std::uint64_t>(to_int(k, v)); }},
      {"name", [&](auto&, auto& v) { sim.name = v; }},
      {"n_frames", [&](auto& k, auto& v) { sim.n_frames = static_cast<int>(to_int(k, v)); }},
      {"frame_rate", [&](auto& k, auto& v) { sim.frame_rate = to_double(k, v); }},
      {"players_per_team", [&](auto& k, auto& v) { sim.players_per_team = static_cast<int>(to_int(k, v)); }},
      {"goalkeepers_per_team", [&](auto& k, auto& v) { sim.goalkeepers_per_team = static_cast<int>(to_int(k, v)); }},
      {"referees", [&](auto& k, auto& v) { sim.referees = static_cast<int>(to_int(k, v)); }},
      {"others", [&](auto& k, auto& v) { sim.others = static_cast<int>(to_int(k, v)); }},
      {"jerseys", [&](auto& k, auto& v) { sim.jerseys = to_bool(k, v); }},
      {"max_speed", [&](auto& k, auto& v) { sim.max_speed = to_double(k, v); }},
      {"waypoint_interval_s", [&](auto& k, auto& v) { sim.waypoint_interval_s = to_double(k, v); }},
      {"smoothing", [&](auto& k, auto& v) { sim.smoothing = to_double(k, v); }},
      {"image_width", [&](auto& k, auto& v) { sim.image_width = static_cast<int>(to_int(k, v)); }},
      {"image_height", [&](auto& k, auto& v) { sim.image_height = static_cast<int>(to_int(k, v)); }},
      {"polyline_points", [&](auto& k, auto& v) { sim.polyline_points = static_cast<int>(to_int(k, v)); }},
      {"athlete_height", [&](auto& k, auto& v) { sim.athlete_height = to_double(k, v); }},
      {"camera.x", [&](auto& k, auto& v) { sim.camera.position.x() = to_double(k, v); }},
      {"camera.y", [&](auto& k, auto& v) { sim.camera.position.y() = to_double(k, v); }},
      {"camera.z", [&](auto& k, auto& v) { sim.camera.position.z() = to_double(k, v); }},
      {"camera.target_y", [&](auto& k, auto& v) { sim.camera.target_y = to_double(k, v); }},
      {"camera.sweep_x", [&](auto& k, auto& v) { sim.camera.sweep_x = to_double(k, v); }},
      {"camera.sweep_period_s", [&](auto& k, auto& v) { sim.camera.sweep_period_s = to_double(k, v); }},
      {"camera.focal_min", [&](auto& k, auto& v) { sim.camera.focal_min = to_double(k, v); }},
      {"camera.focal_max", [&](auto& k, auto& v) { sim.camera.focal_max = to_double(k, v); }},
      {"camera.zoom_period_s", [&](auto& k, auto& v) { sim.camera.zoom_period_s = to_double(k, v); }},
      {"camera.k1", [&](auto& k, auto& v) { sim.camera.k1 = to_double(k, v); }},
      {"perturb.seed", [&](auto& k, auto& v) { perturb.seed = static_cast<std::uint64_t>(to_int(k, v)); }},
      {"perturb.drop_probability", [&](auto& k, auto& v) { perturb.drop_probability = to_double(k, v); }},
      {"perturb.clutter_rate", [&](auto& k, auto& v) { perturb.clutter_rate = to_double(k, v); }},
      {"perturb.noise_sigma", [&](auto& k, auto& v) { perturb.noise_sigma = to_double(k, v); }},
      {"perturb.role_flip", [&](auto& k, auto& v) { perturb.role_flip = to_double(k, v); }},
      {"perturb.team_flip", [&](auto& k, auto& v) { perturb.team_flip = to_double(k, v); }},
      {"perturb.jersey_flip", [&](auto& k, auto& v) { perturb.jersey_flip = to_double(k, v); }},
      {"perturb.id_switch", [&](auto& k, auto& v) { perturb.id_switch = to_double(k, v); }},
      {"perturb.calibration_jitter", [&](auto& k, auto& v) { perturb.calibration_jitter = to_double(k, v); }},
  };
  for (const auto& [key, value] : kv) {
    auto it = setters.find(key);
    if (it == setters.end()) throw Error(ErrorCode::invalid_argument, "unknown config key '" + key + "'");
    it->second(key, value);
  }
}

}  // namespace gsr
