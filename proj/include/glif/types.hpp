#pragma once

#include <Eigen/Core>

#include <cstddef>

namespace glif {

using Index = std::ptrdiff_t;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// n x K model outputs, one row per individual.
using OutputMatrix = Matrix;

}  // namespace glif
