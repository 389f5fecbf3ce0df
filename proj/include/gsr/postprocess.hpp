#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "gsr/types.hpp"

namespace gsr {

template <class T>
struct Vote {
  std::optional<T> label;
  // Absent confidence counts as 1.
  std::optional<double> confidence;
};

// Most frequent present label. Ties go to the higher summed confidence, then
// to the label seen first.
template <class T>
std::optional<T> majority_vote(const std::vector<Vote<T>>& votes) {
  struct Tally {
    T label;
    int count;
    double confidence;
  };
  std::vector<Tally> tallies;
  for (const auto& v : votes) {
    if (!v.label) continue;
    const double c = v.confidence.value_or(1.0);
    auto it = std::find_if(tallies.begin(), tallies.end(), [&](const Tally& t) { return t.label == *v.label; });
    if (it == tallies.end()) {
      tallies.push_back({*v.label, 1, c});
    } else {
      ++it->count;
      it->confidence += c;
    }
  }
  if (tallies.empty()) return std::nullopt;
  const Tally* best = &tallies.front();
  for (const auto& t : tallies) {
    if (t.count > best->count || (t.count == best->count && t.confidence > best->confidence)) best = &t;
  }
  return best->label;
}

struct Tracklet {
  TrackId track_id = 0;
  std::vector<Vote<Role>> roles;
  std::vector<Vote<int>> jerseys;
  std::vector<Vote<Team>> teams;
  std::vector<Eigen::VectorXd> features;
  std::vector<PitchPoint> points;

  Eigen::VectorXd mean_feature() const;
};

struct KMeansOptions {
  int max_iterations = 100;
  double tolerance = 1e-9;
};

// Cluster index (0 or 1) per input vector. Farthest-pair seeding; the first
// point of that pair seeds cluster 0. Throws Error(invalid_argument) for fewer
// than 2 points or mixed dimensions.
std::vector<int> two_means(const std::vector<Eigen::VectorXd>& points, const KMeansOptions& options = {});

// Clusters tracklets on their mean feature vectors.
std::vector<int> cluster_two_teams(const std::vector<Tracklet>& tracklets, const KMeansOptions& options = {});

// Team for cluster 0 and cluster 1: the cluster whose member detections have
// the smaller mean pitch X is left; equal means label cluster 0 left.
// Throws Error(invalid_argument) when a cluster has no pitch points.
std::array<Team, 2> assign_team_sides(const std::vector<int>& clusters,
                                      const std::vector<std::vector<PitchPoint>>& points);

struct RefineOptions {
  bool vote_roles = true;
  bool vote_jerseys = true;
  bool cluster_teams = true;
};

struct RefineSummary {
  std::size_t tracklets = 0;
  std::size_t player_tracklets_clustered = 0;
  bool teams_from_clustering = false;
};

// Tracklet-level voting and team assignment over a prediction state.
// Embeddings are keyed by (frame, track id). Without at least two embedded
// player tracklets, team labels fall back to a majority vote.
GameState refine_predictions(const GameState& state,
                             const std::map<std::pair<int, TrackId>, std::vector<double>>& embeddings,
                             const RefineOptions& options = {}, RefineSummary* summary = nullptr);

}  // namespace gsr
