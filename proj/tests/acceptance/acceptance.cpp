// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
//   stochgm_acceptance [name-substring ...]
//
// The reference check runs only when STOCHGM_REFERENCE_MANIFEST points at a
// manifest whose entries carry records and fitted model parameters.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "stochgm/catalog_io.hpp"
#include "stochgm/catalog_stats.hpp"
#include "stochgm/error.hpp"
#include "stochgm/fc_opt.hpp"
#include "stochgm/gm_model.hpp"
#include "stochgm/param_dist.hpp"
#include "stochgm/resp_spectrum.hpp"
#include "stochgm/rng.hpp"
#include "stochgm/sensitivity.hpp"

using namespace stochgm;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status = Status::fail;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_s = 0.0;  // 0: no runtime bound
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome verdict(bool ok, std::string detail) {
  return {ok ? Status::pass : Status::fail, std::move(detail)};
}

GMParams reference_params(double fc_hz) {
  GMParams p;
  p.log_ai = std::log(0.3);
  p.d595 = 12.0;
  p.t_mid = 8.0;
  p.omega_mid = 2.0 * kPi * 4.0;
  p.omega_rate = -0.2;
  p.zeta_f = 0.3;
  p.fc_hz = fc_hz;
  p.t_total = 30.0;
  return p;
}

// --------------------------------------------------------------------------

Outcome highpass_transfer() {
  const double dt = 0.01;
  double worst = 0.0;
  std::string where;
  for (double fc : {0.1, 0.5, 1.0}) {
    const double wc = 2.0 * kPi * fc;
    const std::vector<double> delta = {1.0 / dt};
    const auto h = highpass(delta, fc, dt);
    for (int k = 0; k <= 200; ++k) {
      const double w = wc / 4.0 * std::pow(40.0, k / 200.0);
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        acc += h[i] * std::polar(1.0, -w * dt * static_cast<double>(i));
      }
      const double mag = std::abs(acc) * dt;
      const double expected = w * w / (w * w + wc * wc);
      const double err = std::abs(mag - expected) / expected;
      if (err > worst) {
        worst = err;
        where = fmt("fc=%.1f Hz, w/wc=%.3f", fc, w / wc);
      }
    }
  }
  return verdict(worst < 0.02, fmt("max relative error %.2e at %s (tol 2e-2)", worst, where.c_str()));
}

Outcome zero_residuals() {
  const auto batch = simulate_motions(reference_params(0.5), 0.01, 100, kDefaultSeed, Engine::temporal);
  double worst_v = 0.0, worst_d = 0.0;
  for (std::size_t r = 0; r < batch.size(); ++r) {
    const auto a = batch.row(r);
    double v = 0.0, d = 0.0, pv = 0.0, pd = 0.0;
    for (std::size_t i = 1; i < a.size(); ++i) {
      const double vn = v + 0.5 * batch.dt * (a[i - 1] + a[i]);
      d += 0.5 * batch.dt * (v + vn);
      v = vn;
      pv = std::max(pv, std::abs(v));
      pd = std::max(pd, std::abs(d));
    }
    worst_v = std::max(worst_v, std::abs(v) / pv);
    worst_d = std::max(worst_d, std::abs(d) / pd);
  }
  return verdict(worst_v < 1e-3 && worst_d < 1e-3,
                 fmt("worst |v_end|/max|v| = %.2e, |d_end|/max|d| = %.2e (tol 1e-3)", worst_v, worst_d));
}

Outcome normalization() {
  const auto p = reference_params(0.0);
  const double dt = 0.01;
  const std::size_t n = 10000;
  const auto q = solve_modulator(p.log_ai, p.d595, p.t_mid, p.t_total);
  std::vector<double> env(time_steps(p.t_total, dt));
  for (std::size_t i = 0; i < env.size(); ++i) env[i] = q(static_cast<double>(i) * dt);
  const auto sp = extract_simple_params(env, dt);

  std::string detail;
  bool ok = true;
  for (Engine engine : {Engine::temporal, Engine::spectral}) {
    const RowMatrix x = unit_process(p, dt, n, kDefaultSeed, engine);
    double worst = 0.0, at = 0.0, mean_dev = 0.0;
    for (int k = 0; k < 20; ++k) {
      const double t = sp.t5 + (sp.t95 - sp.t5) * k / 19.0;
      const auto c = x.col(static_cast<Eigen::Index>(std::lround(t / dt)));
      const double mean = c.mean();
      const double var = (c.array() - mean).square().sum() / static_cast<double>(n - 1);
      mean_dev += (var - 1.0) / 20.0;
      if (std::abs(var - 1.0) > worst) {
        worst = std::abs(var - 1.0);
        at = t;
      }
    }
    ok = ok && worst < 0.03;
    // Sampling sd of one variance estimate is sqrt(2 / (n - 1)); the probe
    // average shows whether any deviation is systematic.
    detail += fmt("%s max |var-1| = %.4f at t=%.2f s, mean var-1 = %+.4f; ",
                  std::string(to_string(engine)).c_str(), worst, at, mean_dev);
  }
  detail += fmt("probes on [%.2f, %.2f] s, sd of one estimate %.4f, tol 0.03", sp.t5, sp.t95,
                std::sqrt(2.0 / static_cast<double>(n - 1)));
  return verdict(ok, detail);
}

Outcome engine_equivalence() {
  // dt = 0.005 s: at 0.01 s the sampled-impulse temporal filter carries a
  // few percent more energy near Nyquist than the spectral sum, which shows
  // up at the 0.05-0.1 s periods of the grid.
  const auto p = reference_params(0.2);
  const double dt = 0.005;
  const std::size_t n = 1000;
  const auto periods = standard_period_grid();
  const RowMatrix a = batch_log_sa(simulate_motions(p, dt, n, kDefaultSeed, Engine::temporal), periods);
  const RowMatrix b = batch_log_sa(simulate_motions(p, dt, n, kDefaultSeed, Engine::spectral), periods);
  double worst = 0.0, at = 0.0, mean_z = 0.0;
  int failing = 0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double ma = a.col(j).mean(), mb = b.col(j).mean();
    const double va = (a.col(j).array() - ma).square().sum() / static_cast<double>(n - 1);
    const double vb = (b.col(j).array() - mb).square().sum() / static_cast<double>(n - 1);
    const double z = (ma - mb) / std::sqrt(va / n + vb / n);
    mean_z += z / static_cast<double>(a.cols());
    if (std::abs(z) > 2.0) ++failing;
    if (std::abs(z) > worst) {
      worst = std::abs(z);
      at = periods[static_cast<std::size_t>(j)];
    }
  }
  return verdict(failing == 0,
                 fmt("%d of 100 periods beyond 2 SE; worst %.2f SE at T=%.3f s; mean signed z %+.2f "
                     "(dt=%.3f)",
                     failing, worst, at, mean_z, dt));
}

Outcome sdof() {
  const double period = 0.5, dt = 0.005, zeta = 0.05;
  const double w = 2.0 * kPi / period;
  std::vector<double> a(static_cast<std::size_t>(50 * period / dt) + 1);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::sin(w * dt * static_cast<double>(i));
  const std::vector<double> t = {period};
  const double amp = compute_sa(a, dt, t, zeta).sa[0];
  const double res_err = std::abs(amp - 10.0) / 10.0;

  const auto periods = standard_period_grid();
  const std::vector<double> zero(3000, 0.0);
  double zero_max = 0.0;
  for (double v : compute_sa(zero, 0.01, periods).sa) zero_max = std::max(zero_max, std::abs(v));

  const auto batch = simulate_motions(reference_params(0.2), 0.01, 1, kDefaultSeed, Engine::temporal);
  std::vector<double> x(batch.row(0).begin(), batch.row(0).end());
  const auto s1 = compute_sa(x, 0.01, periods);
  for (auto& v : x) v *= 7.3;
  const auto s2 = compute_sa(x, 0.01, periods);
  double homog = 0.0;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    homog = std::max(homog, std::abs(s2.sa[k] - 7.3 * s1.sa[k]) / (7.3 * s1.sa[k]));
  }
  return verdict(res_err < 0.05 && zero_max == 0.0 && homog < 1e-10,
                 fmt("amplification %.4f (rel err %.2e, tol 5e-2); zero input max Sa %.1e; "
                     "homogeneity %.1e (tol 1e-10)",
                     amp, res_err, zero_max, homog));
}

Outcome self_recovery() {
  FcSearchConfig cfg;  // grid [0, 2] step 0.01, 100 realizations, seed kDefaultSeed
  bool ok = true;
  std::string detail;
  for (double fc_true : {0.5, 0.2, 1.0}) {
    const auto p = reference_params(fc_true);
    const auto rec = simulate_motions(p, 0.01, 1, kDefaultSeed + 1, Engine::temporal);
    const auto fit = optimize_fc(rec.row(0), rec.dt, p, cfg, Engine::temporal);
    const std::size_t i = fit.index;
    bool local = true;
    if (i > 0) local = local && fit.epsilon[i] <= fit.epsilon[i - 1];
    if (i + 1 < fit.epsilon.size()) local = local && fit.epsilon[i] <= fit.epsilon[i + 1];
    const bool close = std::abs(fit.fc_star - fc_true) <= 0.1 + 1e-9;
    ok = ok && close && local;
    detail += fmt("fc*=%.1f -> %.2f (eps %.3f%s); ", fc_true, fit.fc_star, fit.epsilon[i],
                  local ? "" : ", not a local minimum");
  }
  detail += "tol 0.1 Hz";
  return verdict(ok, detail);
}

// Synthetic design/response fixtures shared by the regression checks.
struct RegFixture {
  std::string name;
  DesignMatrix dm;
  Eigen::MatrixXd y;
  std::vector<double> periods;
};

std::vector<RegFixture> build_regression_fixtures() {
  std::vector<RegFixture> out;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    const Eigen::Index n = 71, k = 7, m = 20;
    Eigen::MatrixXd theta(n, k), beta(k, m);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = nd(rng);
      for (Eigen::Index c = 0; c < k; ++c) theta(i, c) = (c + 1.0) * (0.5 * s + nd(rng)) + c;
    }
    for (Eigen::Index c = 0; c < k; ++c)
      for (Eigen::Index j = 0; j < m; ++j) beta(c, j) = std::cos(0.4 * c + 0.2 * j) / (c + 1.0);
    Eigen::MatrixXd y = theta * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double s = nd(rng);
      for (Eigen::Index j = 0; j < m; ++j) y(i, j) += 0.3 * s + 0.4 * nd(rng);
    }
    RegFixture f{fmt("synthetic-%d", static_cast<int>(seed)), DesignMatrix(theta), y, {}};
    f.periods = log_spaced(0.05, 10.0, static_cast<std::size_t>(m));
    out.push_back(std::move(f));
  }

  // Model-generated catalog: parameters from a copula model, one motion per
  // row, regressed on ln Sa.
  JointParamModel model;
  model.marginals = {{Family::normal, std::log(0.1), 0.6, 0, 1}, {Family::beta, 2.0, 3.0, 4.0, 20.0},
                     {Family::beta, 2.0, 3.0, 3.0, 12.0},        {Family::gamma, 8.0, 2.5, 0, 1},
                     {Family::normal, -0.1, 0.08, 0, 1},         {Family::beta, 3.0, 4.0, 0.1, 0.7},
                     {Family::exponential, 3.0, 0, 0, 1}};
  model.correlation = Eigen::MatrixXd::Identity(7, 7);
  model.correlation(1, 2) = model.correlation(2, 1) = 0.6;
  model.correlation(0, 6) = model.correlation(6, 0) = 0.3;
  const double t_total = 25.0;
  const double dt = 0.01;
  const auto valid = gm_params_validator(t_total);
  const auto sample = sample_params(model, 60, kDefaultSeed, [&](std::span<const double> row) {
    if (!valid(row)) return false;
    std::array<double, kNumInputs> th{};
    std::copy(row.begin(), row.end(), th.begin());
    return GMParams::from_theta(th, t_total).omega_max() * dt < 0.5;
  });
  const auto periods = log_spaced(0.1, 5.0, 15);
  Eigen::MatrixXd y(60, 15);
  for (Eigen::Index i = 0; i < 60; ++i) {
    std::array<double, kNumInputs> th{};
    for (std::size_t c = 0; c < kNumInputs; ++c) th[c] = sample.values(i, static_cast<Eigen::Index>(c));
    const auto p = GMParams::from_theta(th, t_total);
    const auto b = simulate_motions(p, dt, 1, substream_seed(kDefaultSeed, static_cast<std::uint64_t>(i)),
                                    Engine::spectral);
    y.row(i) = batch_log_sa(b, periods).row(0);
  }
  out.push_back({"model-catalog", DesignMatrix(sample.values), y, periods});
  return out;
}

const std::vector<RegFixture>& regression_fixtures() {
  static const std::vector<RegFixture> fixtures = build_regression_fixtures();
  return fixtures;
}

Outcome regression_identities() {
  double var_err = 0.0, cov_err = 0.0, cross = 0.0, pct_err = 0.0;
  const auto fixtures = regression_fixtures();
  for (const auto& f : fixtures) {
    const auto b = fit_regression(f.dm, f.y, f.periods);
    for (std::size_t j = 0; j < b.n_periods(); ++j) {
      const auto v = variance_decompose(b, j);
      const auto c = f.y.col(static_cast<Eigen::Index>(j));
      const double var = (c.array() - c.mean()).square().mean();
      var_err = std::max(var_err, std::abs(v.explained + v.residual - var) / var);
      for (std::size_t k = 0; k < b.n_periods(); ++k) {
        const auto ck = f.y.col(static_cast<Eigen::Index>(k));
        const double cov = ((c.array() - c.mean()) * (ck.array() - ck.mean())).mean();
        const auto t = covariance_decompose(b, j, k);
        const double scale = std::abs(cov);
        cov_err = std::max(cov_err, std::abs(t.sum() - cov) / scale);
        cross = std::max({cross, std::abs(t.terms[1]) / scale, std::abs(t.terms[2]) / scale});
        const auto pct = t.percentages();
        pct_err = std::max(pct_err, std::abs(pct[0] + pct[1] + pct[2] + pct[3] - 100.0));
      }
    }
  }
  return verdict(var_err < 1e-10 && cov_err < 1e-10 && cross < 1e-10 && pct_err < 1e-8,
                 fmt("%zu fixtures: variance %.1e, covariance %.1e, terms 2-3 %.1e (rel), "
                     "percent rows %.1e",
                     fixtures.size(), var_err, cov_err, cross, pct_err));
}

Outcome weighted_identity() {
  double worst = 0.0;
  for (RegFixture f : regression_fixtures()) {
    // Decorrelate the inputs exactly: centred columns times the inverse
    // Cholesky factor of their n-divisor covariance, then rescale.
    const double n = static_cast<double>(f.dm.rows());
    Eigen::MatrixXd c = f.dm.theta.rowwise() - f.dm.theta.colwise().mean();
    const Eigen::MatrixXd cov = c.transpose() * c / n;
    const Eigen::MatrixXd l = cov.llt().matrixL();
    Eigen::MatrixXd white = l.triangularView<Eigen::Lower>().solve(c.transpose()).transpose();
    for (Eigen::Index k = 0; k < white.cols(); ++k) white.col(k) *= 0.3 + 0.5 * k;
    f.dm.theta = white;
    const auto b = fit_regression(f.dm, f.y, f.periods);
    const auto w = weighted_coefficients(b);
    for (std::size_t j = 0; j < b.n_periods(); ++j) {
      const Eigen::VectorXd beta = b.beta.col(static_cast<Eigen::Index>(j));
      const double quad = beta.dot(b.sigma_tt * beta);
      worst = std::max(worst, std::abs(w.col(static_cast<Eigen::Index>(j)).squaredNorm() - quad) / quad);
    }
  }
  return verdict(worst < 1e-10, fmt("max relative gap %.1e (tol 1e-10)", worst));
}

Outcome scenario_math() {
  // Two inputs, the second playing f_c; closed-form moments of a small
  // hand-built data set.
  Eigen::MatrixXd theta(6, 2);
  theta << 0.0, 1.0, 1.0, 0.0, 2.0, 2.0, 3.0, 1.0, 4.0, 4.0, 5.0, 3.0;
  Eigen::MatrixXd y(6, 3);
  for (Eigen::Index i = 0; i < 6; ++i) {
    const double e = (i % 2 ? 0.25 : -0.25) * (i < 3 ? 1.0 : -1.0);
    y(i, 0) = 1.0 + 0.5 * theta(i, 0) - 0.8 * theta(i, 1) + e;
    y(i, 1) = -0.3 * theta(i, 0) + 1.2 * theta(i, 1) - e;
    y(i, 2) = 0.7 * theta(i, 0) + 0.1 * theta(i, 1) + 2.0 * e;
  }
  const auto b = fit_regression(DesignMatrix(theta), y, {0.1, 1.0, 5.0});
  const auto full = scenario_neglect_fc(b, NeglectMode::full, 1);
  const auto cst = scenario_neglect_fc(b, NeglectMode::const_fc, 1);

  // Hand expansion of b' S b with S = [[s11, s12], [s12, s22]] from the raw data.
  const double m1 = theta.col(0).mean(), m2 = theta.col(1).mean();
  double s11 = 0.0, s22 = 0.0, s12 = 0.0;
  for (Eigen::Index i = 0; i < 6; ++i) {
    s11 += (theta(i, 0) - m1) * (theta(i, 0) - m1) / 6.0;
    s22 += (theta(i, 1) - m2) * (theta(i, 1) - m2) / 6.0;
    s12 += (theta(i, 0) - m1) * (theta(i, 1) - m2) / 6.0;
  }
  double worst = 0.0;
  for (Eigen::Index j = 0; j < 3; ++j) {
    const double b1 = b.beta(0, j), b2 = b.beta(1, j);
    const double oracle = b2 * b2 * s22 + 2.0 * b1 * b2 * s12;
    const double got = full.variance(j) - cst.variance(j);
    worst = std::max(worst, std::abs(got - oracle) / std::max(std::abs(oracle), full.variance(j)));
  }
  return verdict(worst < 1e-10, fmt("max relative gap of const_fc variance reduction %.1e (tol 1e-10)", worst));
}

Outcome copula_round_trip() {
  JointParamModel truth;
  truth.marginals = {{Family::normal, -1.5, 0.7, 0, 1},   {Family::beta, 2.2, 3.5, 3.0, 35.0},
                     {Family::beta, 2.5, 2.5, 2.0, 25.0},  {Family::gamma, 5.0, 4.0, 0, 1},
                     {Family::normal, -0.15, 0.1, 0, 1},   {Family::beta, 3.0, 5.0, 0.05, 0.9},
                     {Family::exponential, 2.0, 0, 0, 1}};
  truth.correlation = Eigen::MatrixXd::Identity(7, 7);
  auto set = [&](int i, int j, double v) { truth.correlation(i, j) = truth.correlation(j, i) = v; };
  set(0, 1, -0.35);
  set(1, 2, 0.55);
  set(0, 6, 0.3);
  set(3, 4, -0.2);
  set(5, 6, 0.25);
  set(2, 5, -0.15);
  const auto s = sample_params(truth, 100000, kDefaultSeed);
  const auto fitted = fit_joint(s.values, default_families());
  double marg = 0.0;
  for (std::size_t j = 0; j < 7; ++j) {
    const auto& t = truth.marginals[j];
    const auto& f = fitted.marginals[j];
    const double scale0 = t.family == Family::normal ? std::max(std::abs(t.p0), t.p1) : std::abs(t.p0);
    marg = std::max(marg, std::abs(f.p0 - t.p0) / scale0);
    if (t.family != Family::exponential) marg = std::max(marg, std::abs(f.p1 - t.p1) / t.p1);
  }
  const double corr = (fitted.correlation - truth.correlation).cwiseAbs().maxCoeff();

  const std::vector<double> e = {0.2, 0.4, 0.6};
  const bool exp_exact = fit_marginal(e, Family::exponential).p0 == 1.0 / ((0.2 + 0.4 + 0.6) / 3.0);
  const std::vector<double> x = {1.0, 3.0, 4.0, 8.0, 9.5};
  const double mean = (1.0 + 3.0 + 4.0 + 8.0 + 9.5) / 5.0;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const auto nm = fit_marginal(x, Family::normal);
  const bool norm_exact = std::abs(nm.p0 - mean) <= 1e-15 * mean &&
                          std::abs(nm.p1 - std::sqrt(ss / 5.0)) <= 1e-15 * nm.p1;
  return verdict(marg < 0.05 && corr < 0.03 && exp_exact && norm_exact,
                 fmt("marginal refit %.4f (tol 0.05), copula %.4f (tol 0.03), closed forms %s",
                     marg, corr, exp_exact && norm_exact ? "exact" : "MISMATCH"));
}

Outcome reference_check() {
  const char* path = std::getenv("STOCHGM_REFERENCE_MANIFEST");
  if (!path || !*path) return {Status::skip, "STOCHGM_REFERENCE_MANIFEST not set"};
  const auto cat = load_catalog(std::filesystem::path(path));
  const FcSearchConfig cfg;
  const auto periods = standard_period_grid();

  const CatalogEntry* target = nullptr;
  for (const auto& e : cat.entries) {
    if (e.id.find("1517") != std::string::npos) target = &e;
  }
  if (!target) return {Status::fail, "no entry with id containing 1517"};
  const auto fit = optimize_fc(target->accel, target->dt(), target->params_or_throw(), cfg, Engine::temporal);
  const bool fc_ok = std::abs(fit.fc_star - 0.54) <= 0.05 + 1e-9;

  // Recorded surface, and synthetic surfaces with optimized vs constant f_c.
  const std::size_t reps = 10;
  SpectraMatrix rec, opt, base;
  rec.periods = opt.periods = base.periods = periods;
  rec.log_sa.resize(static_cast<Eigen::Index>(cat.size()), static_cast<Eigen::Index>(periods.size()));
  opt.log_sa.resize(static_cast<Eigen::Index>(cat.size() * reps), rec.log_sa.cols());
  base.log_sa.resizeLike(opt.log_sa);
  for (std::size_t r = 0; r < cat.size(); ++r) {
    const auto& e = cat.entries[r];
    rec.log_sa.row(static_cast<Eigen::Index>(r)) =
        log_sa_rows(Eigen::Map<const RowMatrix>(e.accel.data(), 1, static_cast<Eigen::Index>(e.accel.size())),
                    e.dt(), periods)
            .row(0);
    const auto p = e.params_or_throw();
    const double fc_star = &e == target ? fit.fc_star : optimize_fc(e.accel, e.dt(), p, cfg, Engine::temporal).fc_star;
    const auto x3 = simulate(p, e.dt(), reps, substream_seed(kDefaultSeed, r), Engine::temporal);
    opt.log_sa.middleRows(static_cast<Eigen::Index>(r * reps), reps) = batch_log_sa(highpass(x3, fc_star), periods);
    base.log_sa.middleRows(static_cast<Eigen::Index>(r * reps), reps) = batch_log_sa(highpass(x3, 0.1), periods);
  }
  const auto rho_rec = spectral_correlation(rec);
  const double d_opt = (spectral_correlation(opt) - rho_rec).norm();
  const double d_base = (spectral_correlation(base) - rho_rec).norm();
  return verdict(fc_ok && d_opt < d_base,
                 fmt("%s fc_star = %.2f Hz (tol 0.54 +- 0.05); Frobenius distance optimized %.3f vs "
                     "0.1 Hz baseline %.3f",
                     target->id.c_str(), fit.fc_star, d_opt, d_base));
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"highpass-transfer", 1.0, highpass_transfer},
      {"zero-residuals", 10.0, zero_residuals},
      {"step2-normalization", 120.0, normalization},
      {"engine-equivalence", 300.0, engine_equivalence},
      {"sdof-resonance", 0.0, sdof},
      {"fc-self-recovery", 600.0, self_recovery},
      {"regression-identities", 0.0, regression_identities},
      {"weighted-coefficient-identity", 0.0, weighted_identity},
      {"scenario-math", 0.0, scenario_math},
      {"copula-round-trip", 0.0, copula_round_trip},
      {"reference-check", 0.0, reference_check},
  };

  int failed = 0;
  for (const auto& c : all) {
    if (argc > 1) {
      bool selected = false;
      for (int i = 1; i < argc; ++i) selected = selected || c.name.find(argv[i]) != std::string::npos;
      if (!selected) continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {Status::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (out.status == Status::pass && c.budget_s > 0.0 && secs > c.budget_s) {
      out.status = Status::fail;
      out.detail += fmt("; runtime %.1f s over the %.0f s budget", secs, c.budget_s);
    }
    const char* tag = out.status == Status::pass ? "PASS" : out.status == Status::skip ? "SKIP" : "FAIL";
    std::printf("%s %-30s %s [%.1f s]\n", tag, c.name.c_str(), out.detail.c_str(), secs);
    std::fflush(stdout);
    if (out.status == Status::fail) ++failed;
  }
  std::printf("%d criterion(s) failed\n", failed);
  return failed == 0 ? 0 : 1;
}
