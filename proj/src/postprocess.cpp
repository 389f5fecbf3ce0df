#include "gsr/postprocess.hpp"

#include <cmath>

#include "gsr/error.hpp"

namespace gsr {

Eigen::VectorXd Tracklet::mean_feature() const {
  if (features.empty()) throw Error(ErrorCode::invalid_argument, "tracklet " + std::to_string(track_id) + " has no features");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(features.front().size());
  for (const auto& f : features) {
    if (f.size() != m.size()) throw Error(ErrorCode::invalid_argument, "feature dimensions differ");
    m += f;
  }
  return m / static_cast<double>(features.size());
}

std::vector<int> two_means(const std::vector<Eigen::VectorXd>& points, const KMeansOptions& options) {
  if (points.size() < 2) throw Error(ErrorCode::invalid_argument, "two-cluster split needs at least 2 points");
  for (const auto& p : points) {
    if (p.size() != points.front().size()) throw Error(ErrorCode::invalid_argument, "feature dimensions differ");
  }
  std::size_t a = 0, b = 1;
  double best = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double d = (points[i] - points[j]).squaredNorm();
      if (d > best) {
        best = d;
        a = i;
        b = j;
      }
    }
  }
  std::array<Eigen::VectorXd, 2> centroid{points[a], points[b]};
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.cwiseAbs().maxCoeff());

  std::vector<int> labels(points.size(), -1);
  for (int it = 0; it < options.max_iterations; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const int l = (points[i] - centroid[0]).squaredNorm() <= (points[i] - centroid[1]).squaredNorm() ? 0 : 1;
      changed = changed || l != labels[i];
      labels[i] = l;
    }
    double moved = 0.0;
    for (int c = 0; c < 2; ++c) {
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(centroid[c].size());
      int n = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (labels[i] == c) {
          sum += points[i];
          ++n;
        }
      }
      if (n == 0) continue;
      const Eigen::VectorXd next = sum / n;
      moved = std::max(moved, (next - centroid[c]).norm());
      centroid[c] = next;
    }
    // Movement is judged relative to the data scale.
    if (!changed || moved <= options.tolerance * std::max(scale, 1e-300)) break;
  }
  return labels;
}

std::vector<int> cluster_two_teams(const std::vector<Tracklet>& tracklets, const KMeansOptions& options) {
  if (tracklets.size() < 2) throw Error(ErrorCode::invalid_argument, "team clustering needs at least 2 player tracklets");
  std::vector<Eigen::VectorXd> means;
  means.reserve(tracklets.size());
  for (const auto& t : tracklets) means.push_back(t.mean_feature());
  return two_means(means, options);
}

std::array<Team, 2> assign_team_sides(const std::vector<int>& clusters,
                                      const std::vector<std::vector<PitchPoint>>& points) {
  if (clusters.size() != points.size()) throw Error(ErrorCode::invalid_argument, "cluster and point lists differ in length");
  std::array<double, 2> sum{0.0, 0.0};
  std::array<std::size_t, 2> n{0, 0};
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const int c = clusters[i];
    if (c != 0 && c != 1) throw Error(ErrorCode::invalid_argument, "cluster labels must be 0 or 1");
    for (const auto& p : points[i]) {
      sum[static_cast<std::size_t>(c)] += p.x;
      ++n[static_cast<std::size_t>(c)];
    }
  }
  for (int c = 0; c < 2; ++c) {
    if (n[static_cast<std::size_t>(c)] == 0) {
      throw Error(ErrorCode::invalid_argument, "cluster " + std::to_string(c) + " has no pitch points");
    }
  }
  const double m0 = sum[0] / static_cast<double>(n[0]);
  const double m1 = sum[1] / static_cast<double>(n[1]);
  if (m0 <= m1) return {Team::left, Team::right};
  return {Team::right, Team::left};
}

GameState refine_predictions(const GameState& state,
                             const std::map<std::pair<int, TrackId>, std::vector<double>>& embeddings,
                             const RefineOptions& options, RefineSummary* summary) {
  std::map<TrackId, Tracklet> tracklets;
  for (int f = 1; f <= state.num_frames(); ++f) {
    for (const auto& d : state.frame(f)) {
      Tracklet& t = tracklets[d.track_id];
      t.track_id = d.track_id;
      t.roles.push_back({d.attributes.role, d.confidence});
      t.jerseys.push_back({d.attributes.jersey, d.confidence});
      t.teams.push_back({d.attributes.team, d.confidence});
      if (d.pitch_point) t.points.push_back(*d.pitch_point);
      auto e = embeddings.find({f, d.track_id});
      if (e != embeddings.end() && !e->second.empty()) {
        t.features.push_back(Eigen::Map<const Eigen::VectorXd>(e->second.data(), static_cast<Eigen::Index>(e->second.size())));
      }
    }
  }

  struct Resolved {
    Role role = Role::other;
    std::optional<Team> team;
    std::optional<int> jersey;
  };
  std::map<TrackId, Resolved> resolved;
  for (const auto& [id, t] : tracklets) {
    Resolved r;
    r.role = options.vote_roles ? majority_vote(t.roles).value_or(Role::other) : t.roles.front().label.value_or(Role::other);
    r.jersey = options.vote_jerseys ? majority_vote(t.jerseys) : t.jerseys.front().label;
    r.team = majority_vote(t.teams);
    resolved[id] = r;
  }

  RefineSummary local;
  local.tracklets = tracklets.size();
  if (options.cluster_teams) {
    std::vector<Tracklet> players;
    std::vector<TrackId> ids;
    for (const auto& [id, t] : tracklets) {
      if (resolved[id].role == Role::player && !t.features.empty() && !t.points.empty()) {
        players.push_back(t);
        ids.push_back(id);
      }
    }
    bool dims_ok = !players.empty();
    for (const auto& t : players)
      for (const auto& f : t.features) dims_ok = dims_ok && f.size() == players.front().features.front().size();
    if (players.size() >= 2 && dims_ok) {
      const std::vector<int> labels = cluster_two_teams(players);
      std::vector<std::vector<PitchPoint>> pts;
      for (const auto& t : players) pts.push_back(t.points);
      const bool both = std::count(labels.begin(), labels.end(), 0) > 0 && std::count(labels.begin(), labels.end(), 1) > 0;
      if (both) {
        const std::array<Team, 2> sides = assign_team_sides(labels, pts);
        for (std::size_t i = 0; i < ids.size(); ++i) resolved[ids[i]].team = sides[static_cast<std::size_t>(labels[i])];
        local.teams_from_clustering = true;
        local.player_tracklets_clustered = players.size();
      }
    }
    // Goalkeepers take the side of the half they stand in.
    if (local.teams_from_clustering) {
      for (const auto& [id, t] : tracklets) {
        if (resolved[id].role != Role::goalkeeper || t.points.empty()) continue;
        double x = 0.0;
        for (const auto& p : t.points) x += p.x;
        resolved[id].team = x < 0.0 ? Team::left : Team::right;
      }
    }
  }

  GameState out;
  out.sequence = state.sequence;
  out.frames = state.frames;
  for (auto& frame : out.frames) {
    for (auto& d : frame) {
      const Resolved& r = resolved.at(d.track_id);
      d.attributes.role = r.role;
      if (carries_team(r.role)) {
        d.attributes.team = r.team;
        d.attributes.jersey = r.team ? r.jersey : std::nullopt;
      } else {
        d.attributes.team.reset();
        d.attributes.jersey.reset();
      }
    }
  }
  if (summary) *summary = local;
  return out;
}

}  // namespace gsr
