#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stochgm/types.hpp"

namespace stochgm {

/// ln Sa for a catalog: one row per record, one column per period.
struct SpectraMatrix {
  RowMatrix log_sa;
  std::vector<double> periods;
  std::vector<std::string> ids;

  std::size_t records() const { return static_cast<std::size_t>(log_sa.rows()); }
  void validate() const;
};

/// Per-period empirical quantile, linear interpolation between order
/// statistics: h = (n - 1) q, x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
/// (Hyndman-Fan type 7; the median-unbiased type 8 would use h = (n + 1/3) q - 2/3.)
std::vector<double> spectral_quantiles(const SpectraMatrix& sm, double q);

/// Per-period sample standard deviation (n - 1 divisor).
std::vector<double> spectral_std(const SpectraMatrix& sm);

/// Pearson correlation between periods. Symmetric with an exact unit diagonal.
Eigen::MatrixXd spectral_correlation(const SpectraMatrix& sm);

struct SimpleParams {
  double arias = 0.0;  // m/s
  double log_ai = 0.0;
  double d595 = 0.0;
  double t_mid = 0.0;  // = t45
  double t5 = 0.0;
  double t45 = 0.0;
  double t95 = 0.0;
};

/// AI = (pi / 2g) int a^2 dt (trapezoidal) and the 5/45/95% crossing times
/// of the normalized Husid curve. `accel` in m/s^2.
SimpleParams extract_simple_params(std::span<const double> accel, double dt);

}  // namespace stochgm
