#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "stochgm/error.hpp"
#include "stochgm/sensitivity.hpp"
#include "support.hpp"

using namespace stochgm;

namespace {

struct Fixture {
  DesignMatrix dm;
  Eigen::MatrixXd y;
  std::vector<double> periods;
};

// Correlated inputs and a response with per-period coefficients plus noise.
Fixture make_fixture(std::size_t n, std::size_t inputs, std::size_t periods, double noise,
                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd theta(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(inputs));
  for (Eigen::Index i = 0; i < theta.rows(); ++i) {
    const double shared = nd(rng);
    for (Eigen::Index k = 0; k < theta.cols(); ++k) {
      theta(i, k) = (1.0 + static_cast<double>(k)) * (0.6 * shared + nd(rng)) + 3.0 * static_cast<double>(k);
    }
  }
  Eigen::MatrixXd beta(static_cast<Eigen::Index>(inputs), static_cast<Eigen::Index>(periods));
  for (Eigen::Index k = 0; k < beta.rows(); ++k)
    for (Eigen::Index j = 0; j < beta.cols(); ++j)
      beta(k, j) = std::sin(1.0 + static_cast<double>(k) * 0.7 + static_cast<double>(j) * 0.3);
  Eigen::MatrixXd y = theta * beta;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const double shared = nd(rng);
    for (Eigen::Index j = 0; j < y.cols(); ++j) y(i, j) += 0.4 + noise * (shared + nd(rng));
  }
  Fixture f{DesignMatrix(theta), y, {}};
  for (std::size_t j = 0; j < periods; ++j) f.periods.push_back(0.1 * static_cast<double>(j + 1));
  return f;
}

double pop_var(const Eigen::VectorXd& v) {
  return (v.array() - v.mean()).square().sum() / static_cast<double>(v.size());
}

double pop_cov(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return ((a.array() - a.mean()) * (b.array() - b.mean())).sum() / static_cast<double>(a.size());
}

}  // namespace

TEST_CASE("OLS on noiseless affine data is exact") {
  auto f = make_fixture(60, 4, 1, 0.0, 1);
  const Eigen::VectorXd y = f.y.col(0);
  const auto fit = ols_fit(f.dm, std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
  for (Eigen::Index k = 0; k < 4; ++k) {
    const double expected = std::sin(1.0 + static_cast<double>(k) * 0.7);
    CHECK(std::abs(fit.beta(k) - expected) <= 1e-8 * std::abs(expected));
  }
  CHECK(fit.beta0 == doctest::Approx(0.4).epsilon(1e-8));
  CHECK(fit.residuals.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("OLS on a constant response") {
  auto f = make_fixture(30, 3, 1, 0.0, 2);
  const std::vector<double> y(30, 1.25);
  const auto fit = ols_fit(f.dm, y);
  CHECK(fit.beta.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(fit.beta0 == doctest::Approx(1.25));
}

TEST_CASE("OLS recovers coefficients within 3 standard errors") {
  const std::size_t n = 10000;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd theta(n, 3);
  Eigen::VectorXd y(n);
  const Eigen::Vector3d beta(0.5, -1.0, 2.0);
  const double sigma = 0.7;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index k = 0; k < 3; ++k) theta(i, k) = nd(rng) * (1.0 + static_cast<double>(k));
    y(i) = 1.0 + theta.row(i).dot(beta) + sigma * nd(rng);
  }
  const auto fit = ols_fit(DesignMatrix(theta), std::span<const double>(y.data(), n));
  for (Eigen::Index k = 0; k < 3; ++k) {
    const double se = sigma / (std::sqrt(static_cast<double>(n)) * (1.0 + static_cast<double>(k)));
    CHECK(std::abs(fit.beta(k) - beta(k)) < 3.0 * se);
  }
}

TEST_CASE("design matrix validation") {
  Eigen::MatrixXd small(3, 3);
  small.setRandom();
  CHECK_THROWS_AS(DesignMatrix(small).validate(), Error);
  auto f = make_fixture(40, 3, 1, 0.1, 4);
  f.dm.theta.col(2) = 2.0 * f.dm.theta.col(0);
  f.dm.validate();
  try {
    fit_regression(f.dm, f.y, f.periods);
    FAIL("expected rank_deficient");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::rank_deficient);
  }
}

TEST_CASE("variance and covariance identities") {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    const auto f = make_fixture(80, 7, 6, 0.5, seed);
    const auto b = fit_regression(f.dm, f.y, f.periods);
    for (std::size_t j = 0; j < 6; ++j) {
      const auto v = variance_decompose(b, j);
      const double target = pop_var(f.y.col(static_cast<Eigen::Index>(j)));
      CHECK(std::abs(v.explained + v.residual - target) <= 1e-10 * target);
      CHECK(v.total == doctest::Approx(target).epsilon(1e-12));
      for (std::size_t k = 0; k < 6; ++k) {
        const auto c = covariance_decompose(b, j, k);
        const double cov = pop_cov(f.y.col(static_cast<Eigen::Index>(j)), f.y.col(static_cast<Eigen::Index>(k)));
        CHECK(std::abs(c.sum() - cov) <= 1e-10 * std::abs(cov));
        CHECK(std::abs(c.terms[1]) <= 1e-10 * std::abs(cov));
        CHECK(std::abs(c.terms[2]) <= 1e-10 * std::abs(cov));
        const auto pct = c.percentages();
        CHECK(std::abs(pct[0] + pct[1] + pct[2] + pct[3] - 100.0) < 1e-8);
      }
      const auto same = covariance_decompose(b, j, j);
      CHECK(same.terms[0] == doctest::Approx(v.explained).epsilon(1e-12));
      CHECK(same.terms[3] == doctest::Approx(v.residual).epsilon(1e-12));
    }
  }
}

TEST_CASE("R^2 behaviour") {
  const auto exact = make_fixture(50, 3, 4, 0.0, 8);
  for (double r : r_squared(fit_regression(exact.dm, exact.y, exact.periods))) {
    CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
  }
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  auto indep = make_fixture(5000, 3, 2, 0.0, 10);
  for (Eigen::Index i = 0; i < indep.y.rows(); ++i)
    for (Eigen::Index j = 0; j < indep.y.cols(); ++j) indep.y(i, j) = nd(rng);
  for (double r : r_squared(fit_regression(indep.dm, indep.y, indep.periods))) {
    CHECK(r < 0.005);
  }
}

TEST_CASE("affine change of an input leaves fitted quantities unchanged") {
  auto f = make_fixture(70, 4, 3, 0.3, 11);
  const auto base = fit_regression(f.dm, f.y, f.periods);
  f.dm.theta.col(2) = f.dm.theta.col(2) * -4.0 + Eigen::VectorXd::Constant(70, 12.0);
  const auto moved = fit_regression(f.dm, f.y, f.periods);
  CHECK((base.residuals - moved.residuals).cwiseAbs().maxCoeff() < 1e-10);
  const auto r1 = r_squared(base), r2 = r_squared(moved);
  for (std::size_t j = 0; j < r1.size(); ++j) CHECK(r1[j] == doctest::Approx(r2[j]).epsilon(1e-12));
  const auto w1 = weighted_coefficients(base), w2 = weighted_coefficients(moved);
  CHECK((w1.row(2) + w2.row(2)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((w1.row(0) - w2.row(0)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("weighted coefficients with decorrelated inputs") {
  auto f = make_fixture(200, 7, 5, 0.4, 12);
  // Whiten the inputs so the n-divisor covariance is diagonal, then give
  // each column its own scale.
  Eigen::MatrixXd c = f.dm.theta.rowwise() - f.dm.theta.colwise().mean();
  const Eigen::MatrixXd cov = c.transpose() * c / 200.0;
  const Eigen::MatrixXd l = cov.llt().matrixL();
  Eigen::MatrixXd white = l.triangularView<Eigen::Lower>().solve(c.transpose()).transpose();
  for (Eigen::Index k = 0; k < 7; ++k) white.col(k) *= 0.5 + static_cast<double>(k);
  f.dm.theta = white;
  const auto b = fit_regression(f.dm, f.y, f.periods);
  const auto w = weighted_coefficients(b);
  for (std::size_t j = 0; j < 5; ++j) {
    const double explained = variance_decompose(b, j).explained;
    const double sum_sq = w.col(static_cast<Eigen::Index>(j)).squaredNorm();
    CHECK(std::abs(sum_sq - explained) <= 1e-10 * explained);
  }
}

TEST_CASE("constant input column has zero weighted coefficient") {
  auto f = make_fixture(60, 3, 2, 0.2, 13);
  f.dm.theta.col(2).setConstant(0.1);
  const auto b = fit_regression(f.dm, f.y, f.periods);
  const auto w = weighted_coefficients(b);
  CHECK(w.row(2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(variance_decompose(b, 0).explained + variance_decompose(b, 0).residual ==
        doctest::Approx(variance_decompose(b, 0).total).epsilon(1e-10));
}

TEST_CASE("doubling a column's units keeps beta * sigma") {
  auto f = make_fixture(60, 3, 2, 0.2, 14);
  const auto w1 = weighted_coefficients(fit_regression(f.dm, f.y, f.periods));
  f.dm.theta.col(1) *= 2.0;
  const auto w2 = weighted_coefficients(fit_regression(f.dm, f.y, f.periods));
  CHECK((w1 - w2).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("scenario surfaces against a hand-expanded two-input oracle") {
  const auto f = make_fixture(120, 2, 4, 0.3, 15);
  const auto b = fit_regression(f.dm, f.y, f.periods);
  const double s11 = b.sigma_tt(0, 0), s22 = b.sigma_tt(1, 1), s12 = b.sigma_tt(0, 1);
  const auto full = scenario_neglect_fc(b, NeglectMode::full, 1);
  const auto cst = scenario_neglect_fc(b, NeglectMode::const_fc, 1);
  const auto nocov = scenario_neglect_fc(b, NeglectMode::no_cov, 1);
  for (Eigen::Index j = 0; j < 4; ++j) {
    const double b1 = b.beta(0, j), b2 = b.beta(1, j);
    const double drop = b2 * b2 * s22 + 2.0 * b1 * b2 * s12;
    CHECK(std::abs(full.variance(j) - cst.variance(j) - drop) <= 1e-10 * full.variance(j));
    CHECK(std::abs(full.variance(j) - nocov.variance(j) - 2.0 * b1 * b2 * s12) <=
          1e-10 * full.variance(j));
    CHECK(full.variance(j) == doctest::Approx(variance_decompose(b, static_cast<std::size_t>(j)).total).epsilon(1e-10));
    for (Eigen::Index k = 0; k < 4; ++k) {
      const double c1 = b.beta(0, k), c2 = b.beta(1, k);
      const double cov_drop = (b1 * c2 + b2 * c1) * s12 + b2 * c2 * s22;
      CHECK(std::abs(full.covariance(j, k) - cst.covariance(j, k) - cov_drop) <=
            1e-10 * std::abs(full.covariance(j, k)) + 1e-14);
    }
  }
  for (const auto* s : {&full, &cst, &nocov}) {
    CHECK((s->correlation - s->correlation.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(s->correlation(j, j) == doctest::Approx(1.0));
  }
  CHECK(cst.sigma_tt(1, 1) == 0.0);
  CHECK(cst.sigma_tt(0, 1) == 0.0);
  CHECK(nocov.sigma_tt(1, 1) == s22);
  CHECK(cst.negative_variance.empty());
}

TEST_CASE("no_cov changes nothing when f_c is uncorrelated") {
  auto f = make_fixture(100, 3, 3, 0.3, 16);
  // Make column 2 exactly orthogonal to the centred other columns.
  Eigen::MatrixXd c = f.dm.theta.rowwise() - f.dm.theta.colwise().mean();
  Eigen::VectorXd last = c.col(2);
  const Eigen::MatrixXd others = c.leftCols(2);
  last -= others * others.colPivHouseholderQr().solve(last);
  f.dm.theta.col(2) = last;
  const auto b = fit_regression(f.dm, f.y, f.periods);
  const auto full = scenario_neglect_fc(b, NeglectMode::full, 2);
  const auto nocov = scenario_neglect_fc(b, NeglectMode::no_cov, 2);
  CHECK((full.variance - nocov.variance).cwiseAbs().maxCoeff() < 1e-12 * full.variance.maxCoeff());
  CHECK((full.correlation - nocov.correlation).cwiseAbs().maxCoeff() < 1e-10);
}
