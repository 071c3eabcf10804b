#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "stochgm/params.hpp"

namespace stochgm {

enum class Family { normal, lognormal, beta, gamma, exponential };

std::string_view to_string(Family family) noexcept;
Family family_from_string(std::string_view name);

/// Parameter layout per family:
///   normal      p0 = mean,  p1 = sd
///   lognormal   p0 = mu,    p1 = sigma      (of ln x)
///   beta        p0 = alpha, p1 = beta       on [lo, hi]
///   gamma       p0 = shape, p1 = scale
///   exponential p0 = rate
struct MarginalModel {
  Family family = Family::normal;
  double p0 = 0.0;
  double p1 = 1.0;
  double lo = 0.0;
  double hi = 1.0;

  void validate() const;
  bool in_support(double x) const;
  double cdf(double x) const;
  double quantile(double u) const;
  double pdf(double x) const;
};

/// Maximum-likelihood fit. Beta bounds are fitted too (profile likelihood),
/// never closer than r/(n-1) to the sample extremes, r the sample range.
/// Gamma and beta need n >= 5, the closed-form families n >= 2.
MarginalModel fit_marginal(std::span<const double> samples, Family family);

/// Default family per regression input: normal, beta, beta, gamma, normal,
/// beta, exponential.
std::vector<Family> default_families();

/// Pearson correlation of Gaussian scores z = Phi^-1(F(x)). Projected to
/// the nearest correlation matrix (eigenvalue clipping) when not PSD;
/// `projected` reports whether that happened.
Eigen::MatrixXd fit_copula(const Eigen::MatrixXd& data, std::span<const MarginalModel> marginals,
                           bool* projected = nullptr);

struct JointParamModel {
  std::vector<MarginalModel> marginals;
  Eigen::MatrixXd correlation;
  std::vector<std::string> labels;

  std::size_t dims() const { return marginals.size(); }
  void validate() const;
};

JointParamModel fit_joint(const Eigen::MatrixXd& data, std::span<const Family> families,
                          std::vector<std::string> labels = {});

/// Row predicate for sample_params. Returns true to accept.
using RowValidator = std::function<bool(std::span<const double>)>;

/// Accepts rows that form valid model parameters; with t_total > 0 also
/// checks t_mid < t_total and w(t) > 0 on [0, t_total].
RowValidator gm_params_validator(double t_total = 0.0);

struct ParamSample {
  Eigen::MatrixXd values;  // n x dims
  std::size_t drawn = 0;
  std::size_t rejected = 0;
};

/// Correlated normals through the copula, then each marginal's inverse CDF.
/// Rejected rows are redrawn from the next substream of the same row.
/// Throws excessive_rejection if more than half of all draws are rejected.
ParamSample sample_params(const JointParamModel& model, std::size_t n, std::uint64_t seed,
                          const RowValidator& accept = {});

std::string to_json(const JointParamModel& model);
JointParamModel joint_model_from_json(std::string_view text);
void save_joint_model(const std::filesystem::path& path, const JointParamModel& model);
JointParamModel load_joint_model(const std::filesystem::path& path);

}  // namespace stochgm
