#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "stochgm/error.hpp"
#include "stochgm/gm_model.hpp"
#include "stochgm/types.hpp"

namespace stochgm {

// q^2(t) = a1^2 t^(k-1) exp(-b t) with k = 2 a2 - 1 and b = 2 a3, so the
// normalized cumulative of q^2 on [0, T] is the truncated gamma law
// P(k, b t) / P(k, b T).

double ModulatorCoeffs::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  return std::exp(std::log(a1) + (a2 - 1.0) * std::log(t) - a3 * t);
}

namespace {

namespace bm = boost::math;

constexpr double kTinyMass = 1e-250;

/// Arrival time of fraction p of the truncated q^2 mass.
double arrival(double k, double b, double t_total, double p) {
  const double mass = bm::gamma_p(k, b * t_total);
  return bm::gamma_p_inv(k, p * mass) / b;
}

/// Rate b such that the 45% arrival equals t_mid, for fixed shape k.
/// Returns NaN when no rate reaches t_mid.
double rate_for_tmid(double k, double t_mid, double t_total) {
  auto f = [&](double log_b) { return arrival(k, std::exp(log_b), t_total, 0.45) - t_mid; };

  // The untruncated solution places t45 at or before t_mid once truncation
  // trims the right tail, so it bounds the root from above.
  double hi = std::log(bm::gamma_p_inv(k, 0.45) / t_mid);
  if (f(hi) > 0.0) {
    // Numerically the truncation was negligible and we landed just past.
    hi += 1e-9;
    if (f(hi) > 0.0) return std::exp(hi);
  }
  double lo = hi;
  for (int i = 0; i < 200; ++i) {
    lo -= std::log(2.0);
    if (bm::gamma_p(k, std::exp(lo) * t_total) < kTinyMass) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    if (f(lo) > 0.0) break;
  }
  if (f(lo) <= 0.0) return std::numeric_limits<double>::quiet_NaN();

  std::uintmax_t iters = 200;
  const auto [a, c] = bm::tools::toms748_solve(f, lo, hi, bm::tools::eps_tolerance<double>(50), iters);
  return std::exp(0.5 * (a + c));
}

}  // namespace

ModulatorCoeffs solve_modulator(double log_ai, double d595, double t_mid, double t_total) {
  if (!std::isfinite(log_ai) || !(d595 > 0.0) || !(t_mid > 0.0) || !(t_total > t_mid)) {
    throw Error(Errc::invalid_argument, "modulator targets must satisfy d595 > 0, 0 < t_mid < t_total");
  }
  auto infeasible = [&](const char* why) {
    std::ostringstream os;
    os << "no gamma envelope with d595 = " << d595 << " s, t_mid = " << t_mid
       << " s on [0, " << t_total << "] s (" << why << ")";
    return Error(Errc::no_solution, os.str());
  };
  if (d595 >= t_total) throw infeasible("d595 >= t_total");

  // For a given shape k the 45% arrival cannot exceed T 0.45^(1/k).
  const double k_min = std::max(1.0, std::log(0.45) / std::log(t_mid / t_total));

  auto duration_gap = [&](double k) {
    const double b = rate_for_tmid(k, t_mid, t_total);
    if (!std::isfinite(b)) return std::numeric_limits<double>::quiet_NaN();
    return arrival(k, b, t_total, 0.95) - arrival(k, b, t_total, 0.05) - d595;
  };

  // Scan log k for a sign change, then refine.
  double k_prev = k_min * (1.0 + 1e-6) + 1e-9;
  double g_prev = duration_gap(k_prev);
  double k_lo = 0.0;
  double k_hi = 0.0;
  const double k_max = 5.0e3;
  for (double k = k_prev * 1.15; k <= k_max; k *= 1.15) {
    const double g = duration_gap(k);
    if (std::isfinite(g_prev) && std::isfinite(g) && ((g_prev > 0.0) != (g > 0.0))) {
      k_lo = k_prev;
      k_hi = k;
      break;
    }
    if (std::isfinite(g)) {
      k_prev = k;
      g_prev = g;
    }
  }
  if (k_hi == 0.0) throw infeasible("durations out of reach of the gamma family");

  std::uintmax_t iters = 200;
  const auto [ka, kb] = bm::tools::toms748_solve(duration_gap, k_lo, k_hi,
                                                 bm::tools::eps_tolerance<double>(48), iters);
  const double k = 0.5 * (ka + kb);
  const double b = rate_for_tmid(k, t_mid, t_total);

  // (pi / 2g) int_0^T q^2 dt = AI with int_0^T q^2 = a1^2 Gamma(k) P(k, bT) / b^k.
  const double target = std::exp(log_ai) * 2.0 * kGravity / kPi;
  const double log_a1 = 0.5 * (std::log(target) + k * std::log(b) - std::lgamma(k) -
                               std::log(bm::gamma_p(k, b * t_total)));

  ModulatorCoeffs q;
  q.a1 = std::exp(log_a1);
  q.a2 = 0.5 * (k + 1.0);
  q.a3 = 0.5 * b;
  return q;
}

}  // namespace stochgm
