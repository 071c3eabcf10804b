#include <cmath>

#include "stochgm/error.hpp"
#include "stochgm/gm_model.hpp"
#include "stochgm/parallel.hpp"

namespace stochgm {
namespace {

constexpr double kTailRatio = 1e-8;

void check(double fc_hz, double dt) {
  if (!(fc_hz >= 0.0) || !std::isfinite(fc_hz)) {
    throw Error(Errc::invalid_argument, "corner frequency must be a finite value >= 0");
  }
  if (!(dt > 0.0)) throw Error(Errc::invalid_argument, "dt must be positive");
}

}  // namespace

std::size_t highpass_padding(double fc_hz, double dt) {
  check(fc_hz, dt);
  if (fc_hz == 0.0) return 0;
  // h_f(t) / max h_f = x e^(1 - x) with x = wc t; solve x e^(1 - x) = ratio
  // for x > 1 by Newton on ln: ln x + 1 - x - ln(ratio) = 0.
  const double target = std::log(kTailRatio);
  double x = 1.0 - target + std::log(1.0 - target);
  for (int i = 0; i < 50; ++i) {
    const double f = std::log(x) + 1.0 - x - target;
    const double df = 1.0 / x - 1.0;
    const double step = f / df;
    x -= step;
    if (std::abs(step) < 1e-12 * x) break;
  }
  const double wc = 2.0 * kPi * fc_hz;
  return static_cast<std::size_t>(std::ceil(x / (wc * dt))) + 2;
}

void highpass_into(std::span<const double> x3, double fc_hz, double dt, std::vector<double>& out) {
  check(fc_hz, dt);
  for (double v : x3) {
    if (!std::isfinite(v)) throw Error(Errc::non_finite_sample, "high-pass input is not finite");
  }
  if (fc_hz == 0.0) {
    out.assign(x3.begin(), x3.end());
    return;
  }
  const std::size_t m = x3.size();
  const std::size_t total = m + highpass_padding(fc_hz, dt);
  out.resize(total);

  // z = dt * sum_{k>=1} (k dt) r^k x[i - k], r = exp(-wc dt), computed by its
  // two-pole recursion z[i] = 2r z[i-1] - r^2 z[i-2] + dt^2 r x[i-1].
  // Output is the central second difference of z.
  const double r = std::exp(-2.0 * kPi * fc_hz * dt);
  const double gain = dt * dt * r;
  const double inv_dt2 = 1.0 / (dt * dt);

  double z_prev = 0.0;  // z[i-1]
  double z_cur = 0.0;   // z[i], z[0] = 0
  for (std::size_t i = 0; i < total; ++i) {
    const double x_cur = i < m ? x3[i] : 0.0;
    const double z_next = 2.0 * r * z_cur - r * r * z_prev + gain * x_cur;
    out[i] = (z_next - 2.0 * z_cur + z_prev) * inv_dt2;
    z_prev = z_cur;
    z_cur = z_next;
  }
}

std::vector<double> highpass(std::span<const double> x3, double fc_hz, double dt) {
  std::vector<double> out;
  highpass_into(x3, fc_hz, dt, out);
  return out;
}

SimBatch highpass(const SimBatch& batch, double fc_hz) {
  SimBatch out;
  out.dt = batch.dt;
  out.seed = batch.seed;
  out.params = batch.params;
  out.params.fc_hz = fc_hz;
  out.engine = batch.engine;
  const std::size_t n = batch.size();
  const std::size_t len = batch.length() + highpass_padding(fc_hz, batch.dt);
  out.realizations.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(len));
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> row;
    highpass_into(batch.row(i), fc_hz, batch.dt, row);
    std::copy(row.begin(), row.end(), out.realizations.data() + i * len);
  });
  return out;
}

}  // namespace stochgm
