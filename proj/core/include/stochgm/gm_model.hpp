#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "stochgm/params.hpp"
#include "stochgm/types.hpp"

namespace stochgm {

/// Gamma-type envelope q(t) = a1 * t^(a2 - 1) * exp(-a3 * t).
struct ModulatorCoeffs {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;

  double operator()(double t) const;
};

/// Fits (a1, a2, a3) so the cumulative of q^2 on [0, t_total] reaches 5%,
/// 45% and 95% at t5, t_mid and t5 + d595, and (pi / 2g) * int q^2 = AI.
/// Throws Error(no_solution) when the targets are mutually infeasible.
ModulatorCoeffs solve_modulator(double log_ai, double d595, double t_mid, double t_total);

enum class Engine { temporal, spectral };

std::string_view to_string(Engine engine) noexcept;
Engine engine_from_string(std::string_view name);

/// A set of realizations sharing parameters and a seed. Rows are
/// realizations; acceleration in m/s^2.
struct SimBatch {
  RowMatrix realizations;
  double dt = 0.0;
  std::uint64_t seed = 0;
  GMParams params;
  Engine engine = Engine::temporal;

  std::size_t size() const { return static_cast<std::size_t>(realizations.rows()); }
  std::size_t length() const { return static_cast<std::size_t>(realizations.cols()); }
  std::span<const double> row(std::size_t i) const {
    return {realizations.data() + i * length(), length()};
  }
};

/// Number of samples on [0, t_total] with spacing dt.
std::size_t time_steps(double t_total, double dt);

/// Steps 1-2: unit-variance filtered white noise X2, n x time_steps.
/// The noise of row i is drawn from substream (seed, i).
RowMatrix unit_process(const GMParams& params, double dt, std::size_t n, std::uint64_t seed,
                       Engine engine);

/// Process standard deviation of X1 on the record grid, in closed form for
/// the chosen engine.
std::vector<double> process_stddev(const GMParams& params, double dt, Engine engine);

/// Steps 1-3: modulated process X3 (before high-pass filtering).
SimBatch simulate_temporal(const GMParams& params, double dt, std::size_t n, std::uint64_t seed);
SimBatch simulate_spectral(const GMParams& params, double dt, std::size_t n, std::uint64_t seed);
SimBatch simulate(const GMParams& params, double dt, std::size_t n, std::uint64_t seed, Engine engine);

/// Steps 1-4: ground motions filtered with params.fc_hz. Rows are padded
/// by highpass_padding(params.fc_hz, dt) samples.
SimBatch simulate_motions(const GMParams& params, double dt, std::size_t n, std::uint64_t seed,
                          Engine engine);

// ---------------------------------------------------------------------------
// High-pass filter: critically damped oscillator, h_f(t) = t * exp(-wc t).
// The returned series is d^2/dt^2 (x * h_f), whose transfer function is
// (iw)^2 / (iw + wc)^2, |H| = w^2 / (w^2 + wc^2).
// ---------------------------------------------------------------------------

/// Samples appended so that the filter tail decays below 1e-8 of its peak.
std::size_t highpass_padding(double fc_hz, double dt);

/// fc_hz == 0 returns the input unchanged.
std::vector<double> highpass(std::span<const double> x3, double fc_hz, double dt);

/// Writes into `out` (resized); reuses its capacity across calls.
void highpass_into(std::span<const double> x3, double fc_hz, double dt, std::vector<double>& out);

SimBatch highpass(const SimBatch& batch, double fc_hz);

}  // namespace stochgm
