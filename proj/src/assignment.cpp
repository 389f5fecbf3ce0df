#include "gsr/assignment.hpp"

#include <algorithm>
#include <limits>

namespace gsr {

namespace {

// Shortest augmenting path Hungarian method on an n x n cost matrix
// (minimization). Returns the column assigned to each row.
std::vector<int> hungarian_min(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

std::vector<std::pair<int, int>> max_weight_assignment(const Eigen::MatrixXd& weights,
                                                       const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed) {
  const int rows = static_cast<int>(weights.rows());
  const int cols = static_cast<int>(weights.cols());
  std::vector<std::pair<int, int>> out;
  if (rows == 0 || cols == 0 || !allowed.any()) return out;

  // Only rows and columns with at least one allowed entry take part.
  std::vector<int> live_rows, live_cols;
  for (int r = 0; r < rows; ++r)
    if (allowed.row(r).any()) live_rows.push_back(r);
  for (int c = 0; c < cols; ++c)
    if (allowed.col(c).any()) live_cols.push_back(c);

  // A single allowed entry per row and column needs no solver.
  bool trivial = true;
  for (int r : live_rows) trivial = trivial && allowed.row(r).count() == 1;
  for (int c : live_cols) trivial = trivial && allowed.col(c).count() == 1;
  if (trivial) {
    for (int r : live_rows) {
      for (int c : live_cols) {
        if (allowed(r, c)) out.emplace_back(r, c);
      }
    }
    return out;
  }

  const int n = static_cast<int>(std::max(live_rows.size(), live_cols.size()));
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < live_rows.size(); ++i) {
    for (std::size_t j = 0; j < live_cols.size(); ++j) {
      const int r = live_rows[i], c = live_cols[j];
      if (allowed(r, c)) cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -weights(r, c);
    }
  }
  const std::vector<int> assign = hungarian_min(cost);
  for (std::size_t i = 0; i < live_rows.size(); ++i) {
    const int j = assign[i];
    if (j < 0 || j >= static_cast<int>(live_cols.size())) continue;
    const int r = live_rows[i], c = live_cols[static_cast<std::size_t>(j)];
    if (allowed(r, c)) out.emplace_back(r, c);
  }
  return out;
}

}  // namespace gsr
