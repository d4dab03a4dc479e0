#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace dhlcm {

// Dense row-major doubles throughout; desk-scale N,J so no sparsity.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Labels are 0-based internally; conversion to the 1-based external
// convention is confined to the I/O and C-API layers.
using Labels = std::vector<int>;

}  // namespace dhlcm
