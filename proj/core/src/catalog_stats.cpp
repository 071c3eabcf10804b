#include "stochgm/catalog_stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stochgm/error.hpp"
#include "stochgm/parallel.hpp"

namespace stochgm {

void SpectraMatrix::validate() const {
  if (static_cast<std::size_t>(log_sa.cols()) != periods.size()) {
    throw Error(Errc::invalid_argument, "spectra matrix columns do not match the period grid");
  }
  if (!ids.empty() && ids.size() != records()) {
    throw Error(Errc::invalid_argument, "spectra matrix rows do not match the record ids");
  }
  if (!log_sa.allFinite()) throw Error(Errc::invalid_argument, "spectra matrix has non-finite entries");
}

std::vector<double> spectral_quantiles(const SpectraMatrix& sm, double q) {
  sm.validate();
  if (sm.records() < 2) throw Error(Errc::too_few_records, "quantiles need at least 2 records");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(Errc::invalid_argument, "quantile level must lie in [0, 1]");
  const auto n = sm.records();
  std::vector<double> out(sm.periods.size());
  parallel_for(out.size(), [&](std::size_t j) {
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) {
      col[i] = sm.log_sa(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    std::sort(col.begin(), col.end());
    const double h = static_cast<double>(n - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    out[j] = col[lo] + (h - static_cast<double>(lo)) * (col[hi] - col[lo]);
  });
  return out;
}

std::vector<double> spectral_std(const SpectraMatrix& sm) {
  sm.validate();
  if (sm.records() < 2) throw Error(Errc::too_few_records, "dispersion needs at least 2 records");
  const auto n = static_cast<double>(sm.records());
  std::vector<double> out(sm.periods.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto col = sm.log_sa.col(static_cast<Eigen::Index>(j));
    const double mean = col.mean();
    out[j] = std::sqrt((col.array() - mean).square().sum() / (n - 1.0));
  }
  return out;
}

Eigen::MatrixXd spectral_correlation(const SpectraMatrix& sm) {
  sm.validate();
  if (sm.records() < 3) throw Error(Errc::too_few_records, "correlation needs at least 3 records");
  const auto np = static_cast<Eigen::Index>(sm.periods.size());
  Eigen::MatrixXd centered = sm.log_sa;
  centered.rowwise() -= centered.colwise().mean();
  Eigen::VectorXd norms = centered.colwise().norm();
  for (Eigen::Index j = 0; j < np; ++j) {
    if (!(norms(j) > 0.0)) {
      std::ostringstream os;
      os << "ln Sa has zero variance at T = " << sm.periods[static_cast<std::size_t>(j)] << " s";
      throw Error(Errc::zero_variance_column, os.str());
    }
    centered.col(j) /= norms(j);
  }
  Eigen::MatrixXd rho(np, np);
  for (Eigen::Index a = 0; a < np; ++a) {
    rho(a, a) = 1.0;
    for (Eigen::Index b = a + 1; b < np; ++b) {
      const double r = std::clamp(centered.col(a).dot(centered.col(b)), -1.0, 1.0);
      rho(a, b) = r;
      rho(b, a) = r;
    }
  }
  return rho;
}

SimpleParams extract_simple_params(std::span<const double> accel, double dt) {
  if (!(dt > 0.0)) throw Error(Errc::invalid_argument, "dt must be positive");
  if (accel.size() < 2) throw Error(Errc::invalid_argument, "record needs at least 2 samples");
  const std::size_t n = accel.size();
  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    cum[i] = cum[i - 1] + 0.5 * dt * (accel[i - 1] * accel[i - 1] + accel[i] * accel[i]);
  }
  const double total = cum.back();
  if (!(total > 0.0)) throw Error(Errc::degenerate_record, "record has zero Arias intensity");

  auto crossing = [&](double frac) {
    const double level = frac * total;
    const auto it = std::lower_bound(cum.begin(), cum.end(), level);
    const auto i = static_cast<std::size_t>(it - cum.begin());
    if (i == 0) return 0.0;
    const double span = cum[i] - cum[i - 1];
    const double w = span > 0.0 ? (level - cum[i - 1]) / span : 0.0;
    return (static_cast<double>(i - 1) + w) * dt;
  };

  SimpleParams sp;
  sp.arias = kPi / (2.0 * kGravity) * total;
  sp.log_ai = std::log(sp.arias);
  sp.t5 = crossing(0.05);
  sp.t45 = crossing(0.45);
  sp.t95 = crossing(0.95);
  sp.d595 = sp.t95 - sp.t5;
  sp.t_mid = sp.t45;
  return sp;
}

}  // namespace stochgm
