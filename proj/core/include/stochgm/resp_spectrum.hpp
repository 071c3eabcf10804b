#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stochgm/gm_model.hpp"
#include "stochgm/types.hpp"

namespace stochgm {

inline constexpr double kDefaultDamping = 0.05;

/// Pseudo-acceleration response spectrum. sa is in m/s^2.
struct ResponseSpectrum {
  std::vector<double> periods;
  std::vector<double> sa;
  double damping = kDefaultDamping;
  /// Periods shorter than 2 dt. The value is still the exact recurrence
  /// result, only flagged.
  std::vector<bool> under_resolved;

  bool any_under_resolved() const;
};

/// `count` log-spaced values on [lo, hi], endpoints exact.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

/// 100 log-spaced periods on [0.05, 10] s.
std::vector<double> standard_period_grid();

/// Exact piecewise-linear (Nigam-Jennings) SDOF recurrence;
/// Sa(T) = (2 pi / T)^2 max |u|.
ResponseSpectrum compute_sa(std::span<const double> accel, double dt, std::span<const double> periods,
                            double damping = kDefaultDamping);

/// Peak relative displacement for every period, written into `peak`.
/// Lower-level form of compute_sa used in tight loops.
void peak_displacement(std::span<const double> accel, double dt, std::span<const double> periods,
                       double damping, std::span<double> peak);

/// Row i holds ln Sa of realization i. Throws degenerate_realization if an
/// Sa is zero.
RowMatrix batch_log_sa(const SimBatch& batch, std::span<const double> periods,
                       double damping = kDefaultDamping);
RowMatrix log_sa_rows(const RowMatrix& accel_rows, double dt, std::span<const double> periods,
                      double damping = kDefaultDamping);

}  // namespace stochgm
