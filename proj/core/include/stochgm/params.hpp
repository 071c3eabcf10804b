#pragma once

#include <array>
#include <string_view>

namespace stochgm {

inline constexpr std::size_t kNumInputs = 7;

/// Regression-input order: log AI, D5-95, t_mid, w(t_mid), w'(t_mid), zeta, f_c.
inline constexpr std::array<std::string_view, kNumInputs> kInputLabels = {
    "log_ai", "d595", "t_mid", "omega_mid", "omega_rate", "zeta_f", "fc_hz"};

/// Parameters of the modulated filtered white-noise model.
///
/// The filter frequency follows w(t) = omega_mid + omega_rate * (t - t_mid)
/// with constant damping zeta_f. t_mid is the 45% Arias-intensity arrival.
struct GMParams {
  double log_ai = 0.0;      // ln(AI), AI in m/s
  double d595 = 0.0;        // s
  double t_mid = 0.0;       // s
  double omega_mid = 0.0;   // rad/s
  double omega_rate = 0.0;  // rad/s^2
  double zeta_f = 0.0;
  double fc_hz = 0.0;
  double t_total = 0.0;     // s

  double arias() const;
  double omega_at(double t) const { return omega_mid + omega_rate * (t - t_mid); }
  /// Largest filter frequency on [0, t_total] (w is linear, so an endpoint).
  double omega_max() const;

  /// Throws Error(invalid_argument) when an invariant is violated.
  void validate() const;

  std::array<double, kNumInputs> theta() const;
  static GMParams from_theta(const std::array<double, kNumInputs>& theta, double t_total);
};

}  // namespace stochgm
