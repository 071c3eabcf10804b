#include "stochgm/gm_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stochgm/error.hpp"
#include "stochgm/parallel.hpp"
#include "stochgm/rng.hpp"

namespace stochgm {
namespace {

constexpr std::size_t kTimeBlock = 128;
constexpr std::uint64_t kTemporalLane = 1;
constexpr std::uint64_t kSpectralLane = 2;

using ColMatrix = Eigen::MatrixXd;

void check_discretization(const GMParams& params, double dt) {
  params.validate();
  if (!(dt > 0.0)) throw Error(Errc::invalid_argument, "dt must be positive");
  const double wdt = params.omega_max() * dt;
  if (wdt >= 0.5) {
    std::ostringstream os;
    os << "max filter frequency times dt is " << wdt << " (needs < 0.5); reduce dt";
    throw Error(Errc::unstable_discretization, os.str());
  }
}

/// Impulse response of the filter frozen at frequency w.
inline double impulse(double s, double w, double zeta, double sqrt_1mz2) {
  return w / sqrt_1mz2 * std::exp(-zeta * w * s) * std::sin(w * sqrt_1mz2 * s);
}

/// |H(W | t)| for the filter frozen at frequency w.
inline double transfer_mag(double big_w, double w, double zeta) {
  const double w2 = w * w;
  const double d = w2 - big_w * big_w;
  const double c = 2.0 * zeta * w * big_w;
  return w2 / std::sqrt(d * d + c * c);
}

struct SpectralGrid {
  std::size_t k = 0;
  double dw = 0.0;
};

SpectralGrid spectral_grid(const GMParams& params, double dt) {
  SpectralGrid g;
  g.k = static_cast<std::size_t>(std::ceil(params.t_total / (2.0 * dt) - 1e-9));
  g.k = std::max<std::size_t>(g.k, 1);
  g.dw = kPi / (dt * static_cast<double>(g.k));
  return g;
}

/// Fills the weights of time steps [i0, i0 + cols): column c maps the noise
/// vector to X1(t_{i0 + c}).
void temporal_weights(const GMParams& p, double dt, std::size_t i0, std::size_t cols,
                      ColMatrix& w) {
  const double zeta = p.zeta_f;
  const double s1z = std::sqrt(1.0 - zeta * zeta);
  const double sdt = std::sqrt(dt);
  w.setZero(static_cast<Eigen::Index>(i0 + cols), static_cast<Eigen::Index>(cols));
  for (std::size_t c = 0; c < cols; ++c) {
    const std::size_t i = i0 + c;
    const double t = static_cast<double>(i) * dt;
    for (std::size_t j = 0; j < i; ++j) {
      const double tau = static_cast<double>(j) * dt;
      w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) =
          impulse(t - tau, p.omega_at(tau), zeta, s1z) * sdt;
    }
  }
}

void spectral_weights(const GMParams& p, double dt, const SpectralGrid& g, std::size_t i0,
                      std::size_t cols, ColMatrix& w) {
  const auto kk = static_cast<Eigen::Index>(g.k);
  w.resize(2 * kk, static_cast<Eigen::Index>(cols));
  const double amp = std::sqrt(2.0 * g.dw);
  for (std::size_t c = 0; c < cols; ++c) {
    const double t = static_cast<double>(i0 + c) * dt;
    const double wt = p.omega_at(t);
    for (Eigen::Index k = 0; k < kk; ++k) {
      const double wk = static_cast<double>(k + 1) * g.dw;
      const double h = transfer_mag(wk, wt, p.zeta_f) * amp;
      const double phase = wk * t;
      w(k, static_cast<Eigen::Index>(c)) = h * std::cos(phase);
      w(kk + k, static_cast<Eigen::Index>(c)) = h * std::sin(phase);
    }
  }
}

RowMatrix draw_noise(std::size_t n, std::size_t cols, std::uint64_t seed, std::uint64_t lane) {
  RowMatrix noise(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
  parallel_for(n, [&](std::size_t i) {
    NormalStream rng(seed, i, lane);
    double* row = noise.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) row[j] = rng();
  });
  return noise;
}

}  // namespace

std::string_view to_string(Engine engine) noexcept {
  return engine == Engine::temporal ? "temporal" : "spectral";
}

Engine engine_from_string(std::string_view name) {
  if (name == "temporal") return Engine::temporal;
  if (name == "spectral") return Engine::spectral;
  throw Error(Errc::invalid_argument, "unknown engine \"" + std::string(name) + "\"");
}

std::size_t time_steps(double t_total, double dt) {
  return static_cast<std::size_t>(std::floor(t_total / dt + 1e-9)) + 1;
}

std::vector<double> process_stddev(const GMParams& params, double dt, Engine engine) {
  check_discretization(params, dt);
  const std::size_t m = time_steps(params.t_total, dt);
  std::vector<double> sd(m, 0.0);
  if (engine == Engine::temporal) {
    const double zeta = params.zeta_f;
    const double s1z = std::sqrt(1.0 - zeta * zeta);
    parallel_for(m, [&](std::size_t i) {
      const double t = static_cast<double>(i) * dt;
      double acc = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        const double tau = static_cast<double>(j) * dt;
        const double h = impulse(t - tau, params.omega_at(tau), zeta, s1z);
        acc += h * h * dt;
      }
      sd[i] = std::sqrt(acc);
    });
  } else {
    const auto g = spectral_grid(params, dt);
    parallel_for(m, [&](std::size_t i) {
      const double wt = params.omega_at(static_cast<double>(i) * dt);
      double acc = 0.0;
      for (std::size_t k = 1; k <= g.k; ++k) {
        const double h = transfer_mag(static_cast<double>(k) * g.dw, wt, params.zeta_f);
        acc += h * h * 2.0 * g.dw;
      }
      sd[i] = std::sqrt(acc);
    });
  }
  return sd;
}

RowMatrix unit_process(const GMParams& params, double dt, std::size_t n, std::uint64_t seed,
                       Engine engine) {
  check_discretization(params, dt);
  if (n == 0) throw Error(Errc::invalid_argument, "number of realizations must be positive");
  const std::size_t m = time_steps(params.t_total, dt);
  const SpectralGrid grid = spectral_grid(params, dt);

  const RowMatrix noise = engine == Engine::temporal
                              ? draw_noise(n, m, seed, kTemporalLane)
                              : draw_noise(n, 2 * grid.k, seed, kSpectralLane);

  RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  const std::size_t blocks = (m + kTimeBlock - 1) / kTimeBlock;

  // Each time block owns a disjoint set of columns.
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t i0 = b * kTimeBlock;
    const std::size_t cols = std::min(kTimeBlock, m - i0);
    ColMatrix w;
    Eigen::Index used = 0;
    if (engine == Engine::temporal) {
      temporal_weights(params, dt, i0, cols, w);
      used = static_cast<Eigen::Index>(i0 + cols);
    } else {
      spectral_weights(params, dt, grid, i0, cols, w);
      used = w.rows();
    }
    const Eigen::RowVectorXd var = w.colwise().squaredNorm();
    auto out = x.middleCols(static_cast<Eigen::Index>(i0), static_cast<Eigen::Index>(cols));
    out.noalias() = noise.leftCols(used) * w;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
      const double sd = std::sqrt(var(c));
      if (sd > 0.0) {
        out.col(c) /= sd;
      } else {
        out.col(c).setZero();
      }
    }
  });
  return x;
}

SimBatch simulate(const GMParams& params, double dt, std::size_t n, std::uint64_t seed,
                  Engine engine) {
  SimBatch batch;
  batch.realizations = unit_process(params, dt, n, seed, engine);
  batch.dt = dt;
  batch.seed = seed;
  batch.params = params;
  batch.engine = engine;

  const auto q = solve_modulator(params.log_ai, params.d595, params.t_mid, params.t_total);
  const auto m = static_cast<Eigen::Index>(batch.length());
  Eigen::RowVectorXd env(m);
  for (Eigen::Index j = 0; j < m; ++j) env(j) = q(static_cast<double>(j) * dt);
  batch.realizations.array().rowwise() *= env.array();
  return batch;
}

SimBatch simulate_temporal(const GMParams& params, double dt, std::size_t n, std::uint64_t seed) {
  return simulate(params, dt, n, seed, Engine::temporal);
}

SimBatch simulate_spectral(const GMParams& params, double dt, std::size_t n, std::uint64_t seed) {
  return simulate(params, dt, n, seed, Engine::spectral);
}

SimBatch simulate_motions(const GMParams& params, double dt, std::size_t n, std::uint64_t seed,
                          Engine engine) {
  return highpass(simulate(params, dt, n, seed, engine), params.fc_hz);
}

}  // namespace stochgm
