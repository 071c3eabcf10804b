#include "stochgm/param_dist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>
#include <boost/math/tools/minima.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "stochgm/error.hpp"
#include "stochgm/parallel.hpp"
#include "stochgm/rng.hpp"

namespace stochgm {
namespace bm = boost::math;

namespace {

constexpr double kUnitClamp = 1e-15;

double clamp_unit(double u) { return std::clamp(u, kUnitClamp, 1.0 - kUnitClamp); }

double standard_normal_quantile(double u) {
  static const bm::normal_distribution<double> std_normal(0.0, 1.0);
  return bm::quantile(std_normal, clamp_unit(u));
}

double standard_normal_cdf(double z) {
  static const bm::normal_distribution<double> std_normal(0.0, 1.0);
  return bm::cdf(std_normal, z);
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // population
};

Moments moments(std::span<const double> x) {
  Moments m;
  m.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= static_cast<double>(x.size());
  return m;
}

double fit_gamma_shape(double s) {
  // Solves ln k - digamma(k) = s, starting from the Minka approximation.
  double k = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  for (int i = 0; i < 100; ++i) {
    const double f = std::log(k) - bm::digamma(k) - s;
    const double df = 1.0 / k - bm::trigamma(k);
    double next = k - f / df;
    if (next <= 0.0) next = 0.5 * k;
    if (std::abs(next - k) < 1e-14 * k) {
      k = next;
      break;
    }
    k = next;
  }
  return k;
}

struct BetaShapes {
  double a = 0.0;
  double b = 0.0;
  double loglik = 0.0;  // per sample, including the 1 / (hi - lo) Jacobian
};

/// Shape MLE of the samples mapped to [lo, hi].
BetaShapes fit_beta_shapes(std::span<const double> x, double lo, double hi) {
  const double n = static_cast<double>(x.size());
  const double width = hi - lo;
  std::vector<double> u(x.size());
  double g1 = 0.0, g2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    u[i] = (x[i] - lo) / width;
    g1 += std::log(u[i]);
    g2 += std::log1p(-u[i]);
  }
  g1 /= n;
  g2 /= n;
  const auto mom = moments(u);
  const double common = mom.mean * (1.0 - mom.mean) / mom.var - 1.0;
  double a = std::max(mom.mean * common, 0.1);
  double b = std::max((1.0 - mom.mean) * common, 0.1);

  auto residual = [&](double aa, double bb) {
    const double dab = bm::digamma(aa + bb);
    return std::array<double, 2>{bm::digamma(aa) - dab - g1, bm::digamma(bb) - dab - g2};
  };
  for (int it = 0; it < 200; ++it) {
    const auto r = residual(a, b);
    const double tab = bm::trigamma(a + b);
    const double j11 = bm::trigamma(a) - tab;
    const double j22 = bm::trigamma(b) - tab;
    const double j12 = -tab;
    const double det = j11 * j22 - j12 * j12;
    const double da = (j22 * r[0] - j12 * r[1]) / det;
    const double db = (j11 * r[1] - j12 * r[0]) / det;
    double step = 1.0;
    while (a - step * da <= 0.0 || b - step * db <= 0.0) step *= 0.5;
    const double na = a - step * da;
    const double nb = b - step * db;
    const bool done = std::abs(na - a) < 1e-13 * a && std::abs(nb - b) < 1e-13 * b;
    a = na;
    b = nb;
    if (done) break;
  }
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  return {a, b, (a - 1.0) * g1 + (b - 1.0) * g2 - log_beta - std::log(width)};
}

/// Four-parameter beta: the bounds maximize the profile likelihood, but
/// stay at least r / (n - 1) outside the sample extremes (r = range). The
/// floor also handles shapes below 1, where the likelihood grows without
/// bound as a bound approaches the data.
MarginalModel fit_beta(std::span<const double> x, double mn, double mx) {
  const double r = mx - mn;
  const double n = static_cast<double>(x.size());
  const double s_min = std::log(1.0 / (n - 1.0));
  const double s_max = std::log(2.0);
  double s_lo = s_min, s_hi = s_min;
  auto profile = [&](double sl, double sh) {
    return -fit_beta_shapes(x, mn - r * std::exp(sl), mx + r * std::exp(sh)).loglik;
  };
  double best = profile(s_lo, s_hi);
  for (int round = 0; round < 6; ++round) {
    const double before = best;
    auto lo_step = bm::tools::brent_find_minima([&](double v) { return profile(v, s_hi); }, s_min, s_max, 30);
    if (lo_step.second < best) {
      s_lo = lo_step.first;
      best = lo_step.second;
    }
    auto hi_step = bm::tools::brent_find_minima([&](double v) { return profile(s_lo, v); }, s_min, s_max, 30);
    if (hi_step.second < best) {
      s_hi = hi_step.first;
      best = hi_step.second;
    }
    if (before - best < 1e-9 * std::max(1.0, std::abs(best))) break;
  }
  MarginalModel m;
  m.family = Family::beta;
  m.lo = mn - r * std::exp(s_lo);
  m.hi = mx + r * std::exp(s_hi);
  const auto shapes = fit_beta_shapes(x, m.lo, m.hi);
  m.p0 = shapes.a;
  m.p1 = shapes.b;
  return m;
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::normal: return "normal";
    case Family::lognormal: return "lognormal";
    case Family::beta: return "beta";
    case Family::gamma: return "gamma";
    case Family::exponential: return "exponential";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  for (Family f : {Family::normal, Family::lognormal, Family::beta, Family::gamma, Family::exponential}) {
    if (to_string(f) == name) return f;
  }
  throw Error(Errc::invalid_argument, "unknown distribution family \"" + std::string(name) + "\"");
}

void MarginalModel::validate() const {
  auto bad = [&] {
    throw Error(Errc::invalid_argument, "invalid " + std::string(to_string(family)) + " parameters");
  };
  switch (family) {
    case Family::normal:
    case Family::lognormal:
      if (!std::isfinite(p0) || !(p1 > 0.0)) bad();
      break;
    case Family::beta:
      if (!(p0 > 0.0) || !(p1 > 0.0) || !(hi > lo)) bad();
      break;
    case Family::gamma:
      if (!(p0 > 0.0) || !(p1 > 0.0)) bad();
      break;
    case Family::exponential:
      if (!(p0 > 0.0)) bad();
      break;
  }
}

bool MarginalModel::in_support(double x) const {
  if (!std::isfinite(x)) return false;
  switch (family) {
    case Family::normal: return true;
    case Family::lognormal:
    case Family::gamma: return x > 0.0;
    case Family::exponential: return x >= 0.0;
    case Family::beta: return x >= lo && x <= hi;
  }
  return false;
}

double MarginalModel::cdf(double x) const {
  switch (family) {
    case Family::normal: return bm::cdf(bm::normal_distribution<double>(p0, p1), x);
    case Family::lognormal: return x <= 0.0 ? 0.0 : bm::cdf(bm::lognormal_distribution<double>(p0, p1), x);
    case Family::gamma: return x <= 0.0 ? 0.0 : bm::cdf(bm::gamma_distribution<double>(p0, p1), x);
    case Family::exponential: return x <= 0.0 ? 0.0 : bm::cdf(bm::exponential_distribution<double>(p0), x);
    case Family::beta: {
      if (x <= lo) return 0.0;
      if (x >= hi) return 1.0;
      return bm::cdf(bm::beta_distribution<double>(p0, p1), (x - lo) / (hi - lo));
    }
  }
  return 0.0;
}

double MarginalModel::quantile(double u) const {
  u = clamp_unit(u);
  switch (family) {
    case Family::normal: return bm::quantile(bm::normal_distribution<double>(p0, p1), u);
    case Family::lognormal: return bm::quantile(bm::lognormal_distribution<double>(p0, p1), u);
    case Family::gamma: return bm::quantile(bm::gamma_distribution<double>(p0, p1), u);
    case Family::exponential: return bm::quantile(bm::exponential_distribution<double>(p0), u);
    case Family::beta: return lo + (hi - lo) * bm::quantile(bm::beta_distribution<double>(p0, p1), u);
  }
  return 0.0;
}

double MarginalModel::pdf(double x) const {
  if (!in_support(x)) return 0.0;
  switch (family) {
    case Family::normal: return bm::pdf(bm::normal_distribution<double>(p0, p1), x);
    case Family::lognormal: return bm::pdf(bm::lognormal_distribution<double>(p0, p1), x);
    case Family::gamma: return bm::pdf(bm::gamma_distribution<double>(p0, p1), x);
    case Family::exponential: return bm::pdf(bm::exponential_distribution<double>(p0), x);
    case Family::beta:
      return bm::pdf(bm::beta_distribution<double>(p0, p1), (x - lo) / (hi - lo)) / (hi - lo);
  }
  return 0.0;
}

MarginalModel fit_marginal(std::span<const double> samples, Family family) {
  const std::size_t n = samples.size();
  const bool iterative = family == Family::gamma || family == Family::beta;
  if (n < 2 || (iterative && n < 5)) {
    throw Error(Errc::too_few_records, std::string(to_string(family)) + " fit needs at least " +
                                           (iterative ? "5" : "2") + " samples");
  }
  for (double v : samples) {
    if (!std::isfinite(v)) throw Error(Errc::out_of_support, "samples must be finite");
  }
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  if (*mn == *mx) throw Error(Errc::degenerate_sample, "samples have zero variance");

  MarginalModel m;
  m.family = family;
  switch (family) {
    case Family::normal: {
      const auto mo = moments(samples);
      m.p0 = mo.mean;
      m.p1 = std::sqrt(mo.var);
      break;
    }
    case Family::lognormal: {
      if (*mn <= 0.0) throw Error(Errc::out_of_support, "lognormal samples must be positive");
      std::vector<double> logs(n);
      std::transform(samples.begin(), samples.end(), logs.begin(), [](double v) { return std::log(v); });
      const auto mo = moments(logs);
      m.p0 = mo.mean;
      m.p1 = std::sqrt(mo.var);
      break;
    }
    case Family::exponential: {
      if (*mn < 0.0) throw Error(Errc::out_of_support, "exponential samples must be non-negative");
      m.p0 = 1.0 / moments(samples).mean;
      break;
    }
    case Family::gamma: {
      if (*mn <= 0.0) throw Error(Errc::out_of_support, "gamma samples must be positive");
      const double mean = moments(samples).mean;
      double mean_log = 0.0;
      for (double v : samples) mean_log += std::log(v);
      mean_log /= static_cast<double>(n);
      const double k = fit_gamma_shape(std::log(mean) - mean_log);
      m.p0 = k;
      m.p1 = mean / k;
      break;
    }
    case Family::beta:
      m = fit_beta(samples, *mn, *mx);
      break;
  }
  m.validate();
  return m;
}

std::vector<Family> default_families() {
  return {Family::normal, Family::beta, Family::beta, Family::gamma,
          Family::normal, Family::beta, Family::exponential};
}

Eigen::MatrixXd fit_copula(const Eigen::MatrixXd& data, std::span<const MarginalModel> marginals,
                           bool* projected) {
  const auto d = data.cols();
  if (static_cast<std::size_t>(d) != marginals.size()) {
    throw Error(Errc::invalid_argument, "one marginal per column is required");
  }
  if (data.rows() < 3) throw Error(Errc::too_few_records, "copula fit needs at least 3 rows");
  Eigen::MatrixXd z(data.rows(), d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto& m = marginals[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      z(i, j) = standard_normal_quantile(m.cdf(data(i, j)));
    }
  }
  z.rowwise() -= z.colwise().mean();
  const Eigen::VectorXd norms = z.colwise().norm();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(norms(j) > 0.0)) throw Error(Errc::degenerate_sample, "Gaussian scores have zero variance");
    z.col(j) /= norms(j);
  }
  Eigen::MatrixXd corr = z.transpose() * z;
  corr = 0.5 * (corr + corr.transpose()).eval();
  corr.diagonal().setOnes();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  const bool needs_projection = eig.eigenvalues().minCoeff() < 0.0;
  if (needs_projection) {
    spdlog::warn("copula correlation is not PSD (min eigenvalue {}); clipping eigenvalues",
                 eig.eigenvalues().minCoeff());
    const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(1e-10);
    corr = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
    const Eigen::VectorXd s = corr.diagonal().cwiseSqrt().cwiseInverse();
    corr = s.asDiagonal() * corr * s.asDiagonal();
    corr = 0.5 * (corr + corr.transpose()).eval();
    corr.diagonal().setOnes();
  }
  if (projected) *projected = needs_projection;
  return corr;
}

void JointParamModel::validate() const {
  const auto d = static_cast<Eigen::Index>(marginals.size());
  if (d == 0 || correlation.rows() != d || correlation.cols() != d) {
    throw Error(Errc::invalid_argument, "copula correlation must be d x d with one marginal per dimension");
  }
  for (const auto& m : marginals) m.validate();
  if (!correlation.isApprox(correlation.transpose(), 1e-12)) {
    throw Error(Errc::invalid_argument, "copula correlation must be symmetric");
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(correlation(i, i) - 1.0) > 1e-12) {
      throw Error(Errc::invalid_argument, "copula correlation must have a unit diagonal");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(correlation, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw Error(Errc::invalid_argument, "copula correlation must be positive semidefinite");
  }
}

JointParamModel fit_joint(const Eigen::MatrixXd& data, std::span<const Family> families,
                          std::vector<std::string> labels) {
  if (static_cast<std::size_t>(data.cols()) != families.size()) {
    throw Error(Errc::invalid_argument, "one family per column is required");
  }
  JointParamModel model;
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    const Eigen::VectorXd col = data.col(j);
    try {
      model.marginals.push_back(
          fit_marginal(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
                       families[static_cast<std::size_t>(j)]));
    } catch (const Error& e) {
      rethrow_with_context(e, "column " + (static_cast<std::size_t>(j) < labels.size()
                                               ? labels[static_cast<std::size_t>(j)]
                                               : std::to_string(j)));
    }
  }
  model.correlation = fit_copula(data, model.marginals);
  model.labels = std::move(labels);
  return model;
}

RowValidator gm_params_validator(double t_total) {
  return [t_total](std::span<const double> row) {
    if (row.size() != kNumInputs) return false;
    for (double v : row) {
      if (!std::isfinite(v)) return false;
    }
    const double d595 = row[1], t_mid = row[2], w_mid = row[3], w_rate = row[4], zeta = row[5], fc = row[6];
    if (!(d595 > 0.0 && t_mid > 0.0 && w_mid > 0.0 && zeta > 0.0 && zeta < 1.0 && fc >= 0.0)) return false;
    if (t_total > 0.0) {
      if (!(t_mid < t_total)) return false;
      if (!(w_mid + w_rate * (0.0 - t_mid) > 0.0) || !(w_mid + w_rate * (t_total - t_mid) > 0.0)) {
        return false;
      }
    }
    return true;
  };
}

ParamSample sample_params(const JointParamModel& model, std::size_t n, std::uint64_t seed,
                          const RowValidator& accept) {
  model.validate();
  const auto d = static_cast<Eigen::Index>(model.dims());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(model.correlation);
  const Eigen::MatrixXd factor =
      eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  constexpr std::size_t kMaxAttempts = 1000;
  ParamSample out;
  out.values.resize(static_cast<Eigen::Index>(n), d);
  std::vector<std::size_t> attempts(n, 0);
  std::vector<int> exhausted(n, 0);

  parallel_for(n, [&](std::size_t i) {
    Eigen::VectorXd g(d);
    std::vector<double> row(static_cast<std::size_t>(d));
    for (std::size_t a = 0; a < kMaxAttempts; ++a) {
      NormalStream rng(seed, i, a);
      for (Eigen::Index k = 0; k < d; ++k) g(k) = rng();
      const Eigen::VectorXd z = factor * g;
      bool ok = true;
      for (Eigen::Index k = 0; k < d; ++k) {
        const auto& m = model.marginals[static_cast<std::size_t>(k)];
        const double x = m.quantile(standard_normal_cdf(z(k)));
        row[static_cast<std::size_t>(k)] = x;
        ok = ok && m.in_support(x);
      }
      attempts[i] = a + 1;
      if (ok && (!accept || accept(row))) {
        for (Eigen::Index k = 0; k < d; ++k) out.values(static_cast<Eigen::Index>(i), k) = row[static_cast<std::size_t>(k)];
        return;
      }
    }
    exhausted[i] = 1;
  });

  out.drawn = std::accumulate(attempts.begin(), attempts.end(), std::size_t{0});
  out.rejected = out.drawn - n;
  const bool any_exhausted = std::find(exhausted.begin(), exhausted.end(), 1) != exhausted.end();
  if (any_exhausted || 2 * out.rejected > out.drawn) {
    std::ostringstream os;
    os << out.rejected << " of " << out.drawn << " draws rejected";
    throw Error(Errc::excessive_rejection, os.str());
  }
  return out;
}

std::string to_json(const JointParamModel& model) {
  nlohmann::json j;
  j["format"] = "stochgm-joint-param-model";
  j["version"] = 1;
  j["labels"] = model.labels;
  j["marginals"] = nlohmann::json::array();
  for (const auto& m : model.marginals) {
    nlohmann::json mj = {{"family", to_string(m.family)}, {"p0", m.p0}, {"p1", m.p1}};
    if (m.family == Family::beta) {
      mj["lo"] = m.lo;
      mj["hi"] = m.hi;
    }
    j["marginals"].push_back(mj);
  }
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < model.correlation.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(model.correlation.cols()));
    for (Eigen::Index c = 0; c < model.correlation.cols(); ++c) row[static_cast<std::size_t>(c)] = model.correlation(r, c);
    rows.push_back(row);
  }
  j["correlation"] = rows;
  return j.dump(2);
}

JointParamModel joint_model_from_json(std::string_view text) {
  JointParamModel model;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("labels")) model.labels = j.at("labels").get<std::vector<std::string>>();
    for (const auto& mj : j.at("marginals")) {
      MarginalModel m;
      m.family = family_from_string(mj.at("family").get<std::string>());
      m.p0 = mj.at("p0").get<double>();
      m.p1 = mj.value("p1", 1.0);
      m.lo = mj.value("lo", 0.0);
      m.hi = mj.value("hi", 1.0);
      model.marginals.push_back(m);
    }
    const auto& rows = j.at("correlation");
    const auto d = static_cast<Eigen::Index>(rows.size());
    model.correlation.resize(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      const auto row = rows.at(static_cast<std::size_t>(r)).get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != d) throw Error(Errc::invalid_argument, "correlation must be square");
      for (Eigen::Index c = 0; c < d; ++c) model.correlation(r, c) = row[static_cast<std::size_t>(c)];
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::io_error, std::string("malformed joint model: ") + e.what());
  }
  model.validate();
  return model;
}

void save_joint_model(const std::filesystem::path& path, const JointParamModel& model) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << to_json(model) << '\n';
}

JointParamModel load_joint_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return joint_model_from_json(os.str());
}

}  // namespace stochgm
