#include "stochgm/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stochgm/error.hpp"

namespace stochgm {

double GMParams::arias() const { return std::exp(log_ai); }

double GMParams::omega_max() const { return std::max(omega_at(0.0), omega_at(t_total)); }

void GMParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::invalid_argument, msg); };
  for (double v : {log_ai, d595, t_mid, omega_mid, omega_rate, zeta_f, fc_hz, t_total}) {
    if (!std::isfinite(v)) fail("model parameters must be finite");
  }
  if (d595 <= 0.0) fail("d595 must be positive");
  if (t_mid <= 0.0) fail("t_mid must be positive");
  if (t_mid >= t_total) fail("t_mid must be smaller than t_total");
  if (omega_mid <= 0.0) fail("omega_mid must be positive");
  if (zeta_f <= 0.0 || zeta_f >= 1.0) fail("zeta_f must lie in (0, 1)");
  if (fc_hz < 0.0) fail("fc_hz must be non-negative");
  const double w0 = omega_at(0.0);
  const double w1 = omega_at(t_total);
  if (w0 <= 0.0 || w1 <= 0.0) {
    std::ostringstream os;
    os << "filter frequency must stay positive on [0, t_total]; w(0) = " << w0
       << ", w(t_total) = " << w1;
    fail(os.str());
  }
}

std::array<double, kNumInputs> GMParams::theta() const {
  return {log_ai, d595, t_mid, omega_mid, omega_rate, zeta_f, fc_hz};
}

GMParams GMParams::from_theta(const std::array<double, kNumInputs>& theta, double t_total) {
  GMParams p;
  p.log_ai = theta[0];
  p.d595 = theta[1];
  p.t_mid = theta[2];
  p.omega_mid = theta[3];
  p.omega_rate = theta[4];
  p.zeta_f = theta[5];
  p.fc_hz = theta[6];
  p.t_total = t_total;
  return p;
}

}  // namespace stochgm
