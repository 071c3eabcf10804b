#include "stochgm/fc_opt.hpp"

#include <cmath>
#include <sstream>

#include "stochgm/error.hpp"
#include "stochgm/parallel.hpp"
#include "stochgm/resp_spectrum.hpp"

namespace stochgm {

void FcSearchConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::invalid_argument, msg); };
  if (!(grid_lo >= 0.0) || !(grid_hi >= grid_lo)) fail("f_c grid needs 0 <= lo <= hi");
  if (!(step > 0.0)) fail("f_c grid step must be positive");
  if (n_mc < 2) fail("at least 2 Monte Carlo samples are needed");
  if (n_match_points < 1) fail("at least one match point is needed");
  const auto grid = standard_period_grid();
  if (!(band_lo >= grid.front() && band_hi <= grid.back() && band_lo <= band_hi)) {
    fail("match band must lie within [0.05, 10] s");
  }
  if (!(damping > 0.0 && damping < 1.0)) fail("damping must lie in (0, 1)");
}

std::vector<double> FcSearchConfig::grid() const {
  const auto count = static_cast<std::size_t>(std::llround((grid_hi - grid_lo) / step)) + 1;
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = grid_lo + step * static_cast<double>(i);
  return g;
}

std::vector<double> FcSearchConfig::match_periods() const {
  return log_spaced(band_lo, band_hi, n_match_points);
}

double epsilon(std::span<const double> real_log_sa, const RowMatrix& sim_log_sa) {
  const auto n = sim_log_sa.rows();
  const auto points = sim_log_sa.cols();
  if (static_cast<std::size_t>(points) != real_log_sa.size()) {
    throw Error(Errc::invalid_argument, "recorded and simulated spectra have different lengths");
  }
  if (n < 2) throw Error(Errc::invalid_argument, "epsilon needs at least 2 simulated spectra");
  double total = 0.0;
  for (Eigen::Index j = 0; j < points; ++j) {
    const auto col = sim_log_sa.col(j);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12 * std::abs(mean))) {
      std::ostringstream os;
      os << "simulated spread is zero at match point " << j;
      throw Error(Errc::zero_spread, os.str());
    }
    total += (real_log_sa[static_cast<std::size_t>(j)] - mean) / sd;
  }
  return std::abs(total);
}

FcFit optimize_fc(std::span<const double> accel, double dt, const GMParams& params,
                  const FcSearchConfig& config, Engine engine) {
  config.validate();
  GMParams base = params;
  base.fc_hz = 0.0;
  base.validate();

  const auto periods = config.match_periods();
  const std::size_t np = periods.size();
  const auto recorded = compute_sa(accel, dt, periods, config.damping);
  std::vector<double> real_log(np);
  for (std::size_t j = 0; j < np; ++j) {
    if (!(recorded.sa[j] > 0.0)) {
      throw Error(Errc::degenerate_record, "recorded spectrum is zero inside the match band");
    }
    real_log[j] = std::log(recorded.sa[j]);
  }

  // Common random numbers: one X3 batch serves every grid point.
  const SimBatch x3 = simulate(base, dt, config.n_mc, config.seed, engine);

  FcFit fit;
  fit.grid = config.grid();
  const std::size_t ng = fit.grid.size();
  const std::size_t n = config.n_mc;
  std::vector<RowMatrix> sims(ng, RowMatrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(np)));

  parallel_for(ng * n, [&](std::size_t task) {
    const std::size_t g = task / n;
    const std::size_t i = task % n;
    thread_local std::vector<double> filtered;
    highpass_into(x3.row(i), fit.grid[g], dt, filtered);
    std::span<double> dst(sims[g].data() + i * np, np);
    peak_displacement(filtered, dt, periods, config.damping, dst);
    for (std::size_t j = 0; j < np; ++j) {
      const double w = 2.0 * kPi / periods[j];
      dst[j] = std::log(dst[j] * w * w);
    }
  });

  fit.epsilon.resize(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    try {
      fit.epsilon[g] = epsilon(real_log, sims[g]);
    } catch (const Error& e) {
      std::ostringstream os;
      os << "f_c = " << fit.grid[g] << " Hz";
      rethrow_with_context(e, os.str());
    }
  }
  // Strict '<' keeps the smallest f_c on ties.
  std::size_t best = 0;
  for (std::size_t g = 1; g < ng; ++g) {
    if (fit.epsilon[g] < fit.epsilon[best]) best = g;
  }
  fit.index = best;
  fit.fc_star = fit.grid[best];
  return fit;
}

}  // namespace stochgm
