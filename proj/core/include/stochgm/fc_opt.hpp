#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stochgm/gm_model.hpp"
#include "stochgm/rng.hpp"
#include "stochgm/types.hpp"

namespace stochgm {

/// Grid search settings for the corner-frequency fit.
struct FcSearchConfig {
  double grid_lo = 0.0;   // Hz
  double grid_hi = 2.0;   // Hz
  double step = 0.01;     // Hz
  std::size_t n_mc = 100;
  std::size_t n_match_points = 30;
  double band_lo = 1.0;   // s
  double band_hi = 10.0;  // s
  double damping = 0.05;
  std::uint64_t seed = kDefaultSeed;

  void validate() const;
  std::vector<double> grid() const;
  /// Log-uniform on [band_lo, band_hi], endpoints included.
  std::vector<double> match_periods() const;
};

/// Signed standardized bias summed over the match points, then |.|:
/// eps = | sum_j (real_j - mean_j) / std_j |, with mean/std over the rows of
/// `sim_log_sa` (std uses n - 1). Throws zero_spread on a degenerate column.
double epsilon(std::span<const double> real_log_sa, const RowMatrix& sim_log_sa);

struct FcFit {
  double fc_star = 0.0;
  std::size_t index = 0;
  std::vector<double> grid;
  std::vector<double> epsilon;
};

/// Evaluates eps(fc) on the grid with common random numbers: the n_mc
/// pre-high-pass realizations are drawn once and only the filter and the
/// spectra are recomputed per grid point. Ties go to the smallest fc.
/// `accel` is the recorded motion in m/s^2 at spacing dt; the model is
/// simulated on the same dt. params.fc_hz is ignored.
FcFit optimize_fc(std::span<const double> accel, double dt, const GMParams& params,
                  const FcSearchConfig& config, Engine engine);

}  // namespace stochgm
