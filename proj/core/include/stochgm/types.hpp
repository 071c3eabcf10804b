#pragma once

#include <Eigen/Core>

namespace stochgm {

/// Row-major dense matrix; one row per realization or record, so each
/// time series or spectrum is contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kGravity = 9.80665;
inline constexpr double kPi = 3.14159265358979323846;

}  // namespace stochgm
