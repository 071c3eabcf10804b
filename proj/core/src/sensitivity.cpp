#include "stochgm/sensitivity.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/QR>

#include "stochgm/error.hpp"

namespace stochgm {

DesignMatrix::DesignMatrix(Eigen::MatrixXd values) : theta(std::move(values)) {
  if (static_cast<std::size_t>(theta.cols()) == kNumInputs) {
    labels.assign(kInputLabels.begin(), kInputLabels.end());
  } else {
    for (Eigen::Index j = 0; j < theta.cols(); ++j) labels.push_back("x" + std::to_string(j + 1));
  }
}

DesignMatrix::DesignMatrix(Eigen::MatrixXd values, std::vector<std::string> column_labels)
    : theta(std::move(values)), labels(std::move(column_labels)) {}

namespace {

/// Centered design restricted to non-constant columns, with its QR.
struct CenteredDesign {
  Eigen::RowVectorXd means;
  std::vector<Eigen::Index> active;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
};

CenteredDesign factor(const DesignMatrix& dm) {
  dm.validate();
  CenteredDesign cd;
  cd.means = dm.theta.colwise().mean();
  const Eigen::MatrixXd centered = dm.theta.rowwise() - cd.means;
  // Exactly constant inputs carry no information; their coefficient is 0
  // and the constant is absorbed by the intercept.
  for (Eigen::Index j = 0; j < centered.cols(); ++j) {
    if ((dm.theta.col(j).array() != dm.theta(0, j)).any()) cd.active.push_back(j);
  }
  Eigen::MatrixXd reduced(centered.rows(), static_cast<Eigen::Index>(cd.active.size()));
  for (std::size_t k = 0; k < cd.active.size(); ++k) reduced.col(static_cast<Eigen::Index>(k)) = centered.col(cd.active[k]);
  cd.qr.compute(reduced);
  if (cd.qr.rank() < reduced.cols()) {
    std::ostringstream os;
    os << "design matrix has rank " << cd.qr.rank() << " < " << reduced.cols()
       << " non-constant inputs";
    throw Error(Errc::rank_deficient, os.str());
  }
  return cd;
}

/// Solves for every column of y; returns (beta0 row, beta matrix).
std::pair<Eigen::RowVectorXd, Eigen::MatrixXd> solve(const DesignMatrix& dm, const CenteredDesign& cd,
                                                     const Eigen::MatrixXd& y) {
  const Eigen::RowVectorXd ymean = y.colwise().mean();
  const Eigen::MatrixXd yc = y.rowwise() - ymean;
  const Eigen::MatrixXd b_active = cd.qr.solve(yc);
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(dm.theta.cols(), y.cols());
  for (std::size_t k = 0; k < cd.active.size(); ++k) beta.row(cd.active[k]) = b_active.row(static_cast<Eigen::Index>(k));
  const Eigen::RowVectorXd beta0 = ymean - cd.means * beta;
  return {beta0, beta};
}

}  // namespace

void DesignMatrix::validate() const {
  if (theta.rows() <= theta.cols() + 1) {
    std::ostringstream os;
    os << "regression needs more than " << theta.cols() + 1 << " records, got " << theta.rows();
    throw Error(Errc::too_few_records, os.str());
  }
  if (!theta.allFinite()) throw Error(Errc::invalid_argument, "design matrix has non-finite entries");
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(theta.cols())) {
    throw Error(Errc::invalid_argument, "design matrix labels do not match its columns");
  }
}

OlsFit ols_fit(const DesignMatrix& dm, std::span<const double> y) {
  if (y.size() != dm.rows()) throw Error(Errc::invalid_argument, "response length does not match the design");
  const auto cd = factor(dm);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  const auto [beta0, beta] = solve(dm, cd, yv);
  OlsFit fit;
  fit.beta0 = beta0(0);
  fit.beta = beta.col(0);
  fit.residuals = (yv - dm.theta * fit.beta).array() - fit.beta0;
  return fit;
}

Eigen::MatrixXd population_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.rows() == 0) {
    throw Error(Errc::invalid_argument, "covariance operands need the same, nonzero row count");
  }
  const Eigen::MatrixXd ac = a.rowwise() - a.colwise().mean();
  const Eigen::MatrixXd bc = b.rowwise() - b.colwise().mean();
  return ac.transpose() * bc / static_cast<double>(a.rows());
}

RegressionBundle fit_regression(const DesignMatrix& dm, const Eigen::MatrixXd& y,
                                std::vector<double> periods) {
  if (y.rows() != dm.theta.rows()) throw Error(Errc::invalid_argument, "response rows do not match the design");
  if (static_cast<std::size_t>(y.cols()) != periods.size()) {
    throw Error(Errc::invalid_argument, "response columns do not match the period grid");
  }
  if (!y.allFinite()) throw Error(Errc::invalid_argument, "response has non-finite entries");
  const auto cd = factor(dm);
  const auto [beta0, beta] = solve(dm, cd, y);

  RegressionBundle b;
  b.periods = std::move(periods);
  b.beta0 = beta0.transpose();
  b.beta = beta;
  b.residuals = (y - dm.theta * beta).rowwise() - beta0;
  b.sigma_tt = population_covariance(dm.theta, dm.theta);
  b.sigma_tt = 0.5 * (b.sigma_tt + b.sigma_tt.transpose()).eval();
  b.cov_eps = population_covariance(b.residuals, b.residuals);
  b.var_eps = b.cov_eps.diagonal();
  b.cov_theta_eps = population_covariance(dm.theta, b.residuals);
  b.cov_y = population_covariance(y, y);
  return b;
}

VarianceTerms variance_decompose(const RegressionBundle& bundle, std::size_t period) {
  const auto p = static_cast<Eigen::Index>(period);
  if (p >= bundle.beta.cols()) throw Error(Errc::invalid_argument, "period index out of range");
  VarianceTerms v;
  const auto beta = bundle.beta.col(p);
  v.explained = beta.dot(bundle.sigma_tt * beta);
  v.residual = bundle.var_eps(p);
  v.total = bundle.cov_y(p, p);
  v.r2 = v.total > 0.0 ? v.explained / v.total : std::numeric_limits<double>::quiet_NaN();
  return v;
}

std::array<double, 4> CovarianceTerms::percentages() const {
  std::array<double, 4> pct{};
  for (std::size_t k = 0; k < 4; ++k) pct[k] = 100.0 * terms[k] / total;
  return pct;
}

CovarianceTerms covariance_decompose(const RegressionBundle& bundle, std::size_t p1, std::size_t p2) {
  const auto i = static_cast<Eigen::Index>(p1);
  const auto j = static_cast<Eigen::Index>(p2);
  if (i >= bundle.beta.cols() || j >= bundle.beta.cols()) {
    throw Error(Errc::invalid_argument, "period index out of range");
  }
  const auto b1 = bundle.beta.col(i);
  const auto b2 = bundle.beta.col(j);
  CovarianceTerms c;
  c.terms[0] = b1.dot(bundle.sigma_tt * b2);
  c.terms[1] = b1.dot(bundle.cov_theta_eps.col(j));
  c.terms[2] = b2.dot(bundle.cov_theta_eps.col(i));
  c.terms[3] = bundle.cov_eps(i, j);
  c.total = bundle.cov_y(i, j);
  return c;
}

std::vector<double> r_squared(const RegressionBundle& bundle) {
  std::vector<double> r2(bundle.n_periods());
  for (std::size_t p = 0; p < r2.size(); ++p) r2[p] = variance_decompose(bundle, p).r2;
  return r2;
}

Eigen::MatrixXd weighted_coefficients(const RegressionBundle& bundle) {
  const Eigen::VectorXd sd = bundle.sigma_tt.diagonal().cwiseMax(0.0).cwiseSqrt();
  return bundle.beta.array().colwise() * sd.array();
}

ScenarioSurfaces scenario_neglect_fc(const RegressionBundle& bundle, NeglectMode mode,
                                     std::size_t fc_index) {
  const auto k = static_cast<Eigen::Index>(fc_index);
  if (k >= bundle.sigma_tt.rows()) throw Error(Errc::invalid_argument, "f_c column index out of range");

  ScenarioSurfaces s;
  s.sigma_tt = bundle.sigma_tt;
  if (mode != NeglectMode::full) {
    const double diag = s.sigma_tt(k, k);
    s.sigma_tt.row(k).setZero();
    s.sigma_tt.col(k).setZero();
    if (mode == NeglectMode::no_cov) s.sigma_tt(k, k) = diag;
  }

  const Eigen::MatrixXd cross = bundle.beta.transpose() * bundle.cov_theta_eps;  // b(T1)' Cov(theta, e(T2))
  s.covariance = bundle.beta.transpose() * s.sigma_tt * bundle.beta + cross + cross.transpose() + bundle.cov_eps;
  s.covariance = 0.5 * (s.covariance + s.covariance.transpose()).eval();
  s.variance = s.covariance.diagonal();

  const auto np = s.covariance.rows();
  s.correlation.resize(np, np);
  for (Eigen::Index i = 0; i < np; ++i) {
    if (!(s.variance(i) >= 0.0)) s.negative_variance.push_back(static_cast<std::size_t>(i));
  }
  for (Eigen::Index i = 0; i < np; ++i) {
    for (Eigen::Index j = 0; j < np; ++j) {
      const double denom = std::sqrt(s.variance(i) * s.variance(j));
      s.correlation(i, j) = (s.variance(i) > 0.0 && s.variance(j) > 0.0)
                                ? s.covariance(i, j) / denom
                                : std::numeric_limits<double>::quiet_NaN();
    }
    if (s.variance(i) > 0.0) s.correlation(i, i) = 1.0;
  }
  return s;
}

}  // namespace stochgm
