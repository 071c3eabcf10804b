#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stochgm/params.hpp"

namespace stochgm {

/// Regression inputs, one row per record, columns in kInputLabels order.
struct DesignMatrix {
  Eigen::MatrixXd theta;
  std::vector<std::string> labels;

  DesignMatrix() = default;
  explicit DesignMatrix(Eigen::MatrixXd values);
  DesignMatrix(Eigen::MatrixXd values, std::vector<std::string> column_labels);

  std::size_t rows() const { return static_cast<std::size_t>(theta.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(theta.cols()); }
  /// Requires rows > cols + 1 and finite entries. Column rank is checked
  /// by the fits (rank_deficient).
  void validate() const;
};

struct OlsFit {
  double beta0 = 0.0;
  Eigen::VectorXd beta;
  Eigen::VectorXd residuals;
};

/// Ordinary least squares with intercept. Throws rank_deficient.
OlsFit ols_fit(const DesignMatrix& dm, std::span<const double> y);

/// All covariances use the population divisor n, which makes the variance
/// and covariance decompositions exact identities.
struct RegressionBundle {
  std::vector<double> periods;
  Eigen::VectorXd beta0;          // per period
  Eigen::MatrixXd beta;           // inputs x periods
  Eigen::MatrixXd residuals;      // records x periods
  Eigen::MatrixXd sigma_tt;       // inputs x inputs
  Eigen::VectorXd var_eps;        // per period
  Eigen::MatrixXd cov_eps;        // periods x periods
  Eigen::MatrixXd cov_theta_eps;  // inputs x periods
  Eigen::MatrixXd cov_y;          // empirical Cov(Y(T1), Y(T2))

  std::size_t n_periods() const { return periods.size(); }
  std::size_t n_inputs() const { return static_cast<std::size_t>(sigma_tt.rows()); }
};

/// Independent OLS fit per column of `y` (records x periods).
RegressionBundle fit_regression(const DesignMatrix& dm, const Eigen::MatrixXd& y,
                                std::vector<double> periods);

/// Empirical covariance with divisor n.
Eigen::MatrixXd population_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct VarianceTerms {
  double explained = 0.0;  // beta' Sigma beta
  double residual = 0.0;   // Var(eps)
  double total = 0.0;      // empirical Var(Y)
  double r2 = 0.0;
};
VarianceTerms variance_decompose(const RegressionBundle& bundle, std::size_t period);

struct CovarianceTerms {
  /// b1' S b2, b1' Cov(theta, e2), b2' Cov(theta, e1), Cov(e1, e2).
  std::array<double, 4> terms{};
  double total = 0.0;  // empirical Cov(Y(T1), Y(T2))

  double sum() const { return terms[0] + terms[1] + terms[2] + terms[3]; }
  std::array<double, 4> percentages() const;
};
CovarianceTerms covariance_decompose(const RegressionBundle& bundle, std::size_t p1, std::size_t p2);

std::vector<double> r_squared(const RegressionBundle& bundle);

/// beta_n * sigma_theta_n, inputs x periods.
Eigen::MatrixXd weighted_coefficients(const RegressionBundle& bundle);

enum class NeglectMode {
  full,      // unmodified Sigma
  const_fc,  // f_c row, column and variance set to 0
  no_cov,    // only the off-diagonal f_c row and column set to 0
};

struct ScenarioSurfaces {
  Eigen::MatrixXd sigma_tt;
  Eigen::VectorXd variance;
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd correlation;
  /// Periods whose recomputed variance came out negative (no_cov can break
  /// positive semidefiniteness; reported, not repaired).
  std::vector<std::size_t> negative_variance;
};

/// Recomputes the variance and covariance surfaces with a modified Sigma,
/// keeping beta and the residual terms. `fc_index` is the f_c input column.
ScenarioSurfaces scenario_neglect_fc(const RegressionBundle& bundle, NeglectMode mode,
                                     std::size_t fc_index = kNumInputs - 1);

}  // namespace stochgm
