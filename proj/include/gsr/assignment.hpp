#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace gsr {

// Maximum-weight one-to-one assignment over a rectangular weight matrix.
// Entries where `allowed` is false never appear in the result. Pairs are
// returned sorted by row. Deterministic for identical input.
std::vector<std::pair<int, int>> max_weight_assignment(const Eigen::MatrixXd& weights,
                                                       const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed);

}  // namespace gsr
