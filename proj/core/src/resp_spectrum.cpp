#include "stochgm/resp_spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "stochgm/error.hpp"
#include "stochgm/parallel.hpp"

namespace stochgm {
namespace {

/// Exact state-transition coefficients for u'' + 2 zeta w u' + w^2 u = p(t)
/// with p linear over one step (Nigam-Jennings; Chopra's table with m = 1).
struct StepCoeffs {
  std::vector<double> a, b, c, d;      // displacement row
  std::vector<double> ap, bp, cp, dp;  // velocity row
  std::vector<double> w2;

  StepCoeffs(std::span<const double> periods, double damping, double dt) {
    const std::size_t n = periods.size();
    for (auto* v : {&a, &b, &c, &d, &ap, &bp, &cp, &dp, &w2}) v->resize(n);
    const double z = damping;
    const double sz = std::sqrt(1.0 - z * z);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 2.0 * kPi / periods[i];
      const double wd = w * sz;
      const double k = w * w;
      const double e = std::exp(-z * w * dt);
      const double s = std::sin(wd * dt);
      const double co = std::cos(wd * dt);
      a[i] = e * (z / sz * s + co);
      b[i] = e * s / wd;
      c[i] = (2.0 * z / (w * dt) +
              e * (((1.0 - 2.0 * z * z) / (wd * dt) - z / sz) * s - (1.0 + 2.0 * z / (w * dt)) * co)) /
             k;
      d[i] = (1.0 - 2.0 * z / (w * dt) + e * ((2.0 * z * z - 1.0) / (wd * dt) * s + 2.0 * z / (w * dt) * co)) /
             k;
      ap[i] = -e * (w / sz * s);
      bp[i] = e * (co - z / sz * s);
      cp[i] = (-1.0 / dt + e * ((w / sz + z / (dt * sz)) * s + co / dt)) / k;
      dp[i] = (1.0 - e * (z / sz * s + co)) / (k * dt);
      w2[i] = k;
    }
  }
};

void check_inputs(double dt, std::span<const double> periods, double damping) {
  if (!(dt > 0.0)) throw Error(Errc::invalid_argument, "dt must be positive");
  if (!(damping > 0.0 && damping < 1.0)) {
    throw Error(Errc::invalid_argument, "damping must lie in (0, 1)");
  }
  for (double t : periods) {
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(Errc::invalid_argument, "periods must be positive");
  }
}

}  // namespace

bool ResponseSpectrum::any_under_resolved() const {
  return std::find(under_resolved.begin(), under_resolved.end(), true) != under_resolved.end();
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) {
    throw Error(Errc::invalid_argument, "log_spaced needs 0 < lo <= hi and count > 0");
  }
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double l0 = std::log(lo);
  const double step = (std::log(hi) - l0) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(l0 + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> standard_period_grid() { return log_spaced(0.05, 10.0, 100); }

void peak_displacement(std::span<const double> accel, double dt, std::span<const double> periods,
                       double damping, std::span<double> peak) {
  check_inputs(dt, periods, damping);
  const std::size_t np = periods.size();
  const StepCoeffs k(periods, damping, dt);
  std::vector<double> u(np, 0.0), v(np, 0.0), umax(np, 0.0);
  for (std::size_t i = 0; i + 1 < accel.size(); ++i) {
    const double p0 = -accel[i];
    const double p1 = -accel[i + 1];
    for (std::size_t j = 0; j < np; ++j) {
      const double un = k.a[j] * u[j] + k.b[j] * v[j] + k.c[j] * p0 + k.d[j] * p1;
      const double vn = k.ap[j] * u[j] + k.bp[j] * v[j] + k.cp[j] * p0 + k.dp[j] * p1;
      u[j] = un;
      v[j] = vn;
      umax[j] = std::max(umax[j], std::abs(un));
    }
  }
  std::copy(umax.begin(), umax.end(), peak.begin());
}

ResponseSpectrum compute_sa(std::span<const double> accel, double dt, std::span<const double> periods,
                            double damping) {
  ResponseSpectrum rs;
  rs.periods.assign(periods.begin(), periods.end());
  rs.damping = damping;
  rs.sa.resize(periods.size());
  peak_displacement(accel, dt, periods, damping, rs.sa);
  rs.under_resolved.resize(periods.size());
  for (std::size_t j = 0; j < periods.size(); ++j) {
    const double w = 2.0 * kPi / periods[j];
    rs.sa[j] *= w * w;
    rs.under_resolved[j] = periods[j] < 2.0 * dt;
  }
  return rs;
}

RowMatrix log_sa_rows(const RowMatrix& accel_rows, double dt, std::span<const double> periods,
                      double damping) {
  const auto n = static_cast<std::size_t>(accel_rows.rows());
  const auto m = static_cast<std::size_t>(accel_rows.cols());
  if (n == 0) throw Error(Errc::invalid_argument, "batch is empty");
  check_inputs(dt, periods, damping);
  RowMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(periods.size()));
  std::vector<int> degenerate(n, 0);
  parallel_for(n, [&](std::size_t i) {
    std::span<const double> row(accel_rows.data() + i * m, m);
    std::span<double> dst(out.data() + i * periods.size(), periods.size());
    peak_displacement(row, dt, periods, damping, dst);
    for (std::size_t j = 0; j < periods.size(); ++j) {
      const double w = 2.0 * kPi / periods[j];
      const double sa = dst[j] * w * w;
      if (!(sa > 0.0)) degenerate[i] = 1;
      dst[j] = std::log(sa);
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (degenerate[i]) {
      throw Error(Errc::degenerate_realization,
                  "realization " + std::to_string(i) + " has a zero spectral ordinate");
    }
  }
  return out;
}

RowMatrix batch_log_sa(const SimBatch& batch, std::span<const double> periods, double damping) {
  return log_sa_rows(batch.realizations, batch.dt, periods, damping);
}

}  // namespace stochgm
