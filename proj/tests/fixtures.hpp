#pragma once

// Shared instance builders for unit and acceptance tests.

#include <random>

#include "gsr/metrics.hpp"
#include "gsr/types.hpp"

namespace gsr::testing {

inline Detection det(int frame, TrackId id, double x, double y, Role role = Role::player,
                     std::optional<Team> team = Team::left, std::optional<int> jersey = 10) {
  Detection d;
  d.frame = frame;
  d.track_id = id;
  d.attributes = {role, carries_team(role) ? team : std::nullopt, carries_team(role) ? jersey : std::nullopt};
  d.pitch_point = PitchPoint{x, y};
  d.bbox_image = BBox{100.0 * x + 500, 100.0 * y + 500, 40, 90};
  return d;
}

inline GameState state_of(std::vector<Detection> dets, int frames) {
  GameState s;
  s.sequence = "T";
  s.frames.resize(static_cast<std::size_t>(frames));
  for (auto& d : dets) s.frame(d.frame).push_back(std::move(d));
  return s;
}

// One GT and one prediction 2.5 m apart.
inline std::pair<GameState, GameState> single_offset_instance() {
  return {state_of({det(1, 1, 0, 0)}, 1), state_of({det(1, 1, 2.5, 0)}, 1)};
}

// One GT track over two frames, covered by pred track 1 then pred track 2.
inline std::pair<GameState, GameState> id_switch_instance() {
  return {state_of({det(1, 1, 0, 0), det(2, 1, 1, 0)}, 2), state_of({det(1, 1, 0, 0), det(2, 2, 1, 0)}, 2)};
}

inline Attributes random_attributes(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> role(0, 5), team(0, 2), jersey(0, 2);
  static constexpr Role roles[] = {Role::player, Role::player, Role::player, Role::goalkeeper, Role::referee, Role::other};
  Attributes a;
  a.role = roles[role(rng)];
  if (carries_team(a.role)) {
    const int t = team(rng);
    if (t < 2) a.team = t == 0 ? Team::left : Team::right;
    const int j = jersey(rng);
    if (j < 2) a.jersey = j == 0 ? 7 : 10;
  }
  return a;
}

// Instance within the exhaustive-reference bounds: <= 3 tracks per side,
// <= 4 frames, continuous positions so optimal matchings are unique.
inline std::pair<GameState, GameState> random_small_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nf(1, 4), nt(0, 3), coin(0, 3);
  std::uniform_real_distribution<double> pos(0, 6), jitter(-4, 4);
  const int frames = nf(rng);
  GameState gt, pred;
  gt.sequence = pred.sequence = "R";
  gt.frames.resize(static_cast<std::size_t>(frames));
  pred.frames.resize(static_cast<std::size_t>(frames));

  const int g_tracks = nt(rng), p_tracks = nt(rng);
  std::vector<Attributes> g_attr, p_attr;
  std::vector<std::pair<double, double>> g_pos;
  for (int t = 0; t < g_tracks; ++t) {
    g_attr.push_back(random_attributes(rng));
    g_pos.emplace_back(pos(rng), pos(rng));
  }
  for (int t = 0; t < p_tracks; ++t) p_attr.push_back(coin(rng) == 0 ? random_attributes(rng) : Attributes{});
  for (int t = 0; t < p_tracks; ++t) {
    // Usually copy a GT identity so that pairs actually match.
    if (t < g_tracks && coin(rng) != 0) p_attr[static_cast<std::size_t>(t)] = g_attr[static_cast<std::size_t>(t)];
  }
  for (int f = 1; f <= frames; ++f) {
    for (int t = 0; t < g_tracks; ++t) {
      if (coin(rng) == 0) continue;
      const auto [x, y] = g_pos[static_cast<std::size_t>(t)];
      Detection d;
      d.frame = f;
      d.track_id = t + 1;
      d.attributes = g_attr[static_cast<std::size_t>(t)];
      d.pitch_point = PitchPoint{x + 0.5 * f, y};
      gt.frame(f).push_back(d);
    }
    for (int t = 0; t < p_tracks; ++t) {
      if (coin(rng) == 0) continue;
      Detection d;
      d.frame = f;
      d.track_id = 100 + t;
      d.attributes = p_attr[static_cast<std::size_t>(t)];
      std::pair<double, double> base{pos(rng), pos(rng)};
      const int g = static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(g_tracks, 1)));
      if (g < g_tracks && coin(rng) != 0) base = g_pos[static_cast<std::size_t>(g)];
      d.pitch_point = PitchPoint{base.first + 0.5 * f + jitter(rng), base.second + jitter(rng)};
      pred.frame(f).push_back(d);
    }
  }
  return {gt, pred};
}

inline const std::vector<AttributeFlags>& flag_configurations() {
  static const std::vector<AttributeFlags> all{
      {true, true, true}, {false, true, true}, {true, false, true}, {true, true, false}, {false, false, false}};
  return all;
}

}  // namespace gsr::testing
