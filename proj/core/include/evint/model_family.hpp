#pragma once

#include "evint/dataset.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evint {

/// A Gaussian linear model space: which covariates enter the mean, whether an
/// intercept is present. The error variance is always estimated.
///
/// Covariate indices are zero-based positions in the dataset's covariate
/// columns.
class LinearModelSpace
{
public:
  LinearModelSpace() = default;

  /// @throws ConfigError on duplicate indices.
  explicit LinearModelSpace(std::vector<std::size_t> covariates, bool intercept = true);

  /// Builds a space from an indicator string such as "011": character i set
  /// to '1' includes covariate i. Always has an intercept.
  static LinearModelSpace from_mask(std::string_view mask);

  const std::vector<std::size_t>& covariates() const noexcept { return covariates_; }
  bool has_intercept() const noexcept { return intercept_; }

  /// Number of mean coefficients (intercept plus slopes).
  std::size_t coefficient_count() const noexcept
  {
    return covariates_.size() + (intercept_ ? 1 : 0);
  }

  /// "M_011"-style label when built from a mask, otherwise a covariate list.
  std::string label() const;

  friend bool operator==(const LinearModelSpace&, const LinearModelSpace&) = default;

private:
  std::vector<std::size_t> covariates_;
  bool intercept_ = true;
};

/// Estimated parameters: mean coefficients then variance. Counts the error
/// variance as an estimated parameter.
int param_count(const LinearModelSpace& space) noexcept;

/// How a fit treats a design without full column rank.
enum class RankPolicy
{
  reject,       ///< throw RankDeficient
  minimum_norm, ///< use the minimum-norm least-squares solution
};

struct FittedLinearModel
{
  LinearModelSpace space;
  Eigen::VectorXd beta; ///< intercept first (when present), then slopes in space order
  double sigma2 = 1.0;  ///< error variance, ML divisor n

  /// Conditional mean of row `i` of `data`.
  double mean(const Dataset& data, std::size_t i) const;
};

/// A fully specified distribution for an observation row.
struct SpecifiedModel
{
  std::function<double(double y, std::span<const double> x)> log_density;
  std::string label;

  /// y ~ N(mu, sigma^2), independent of covariates.
  static SpecifiedModel normal(double mu, double sigma);
  /// Freezes a fitted linear model into a fully specified one.
  static SpecifiedModel from_fit(FittedLinearModel fit);
};

/// Design matrix for `space` on `data` (intercept column first).
/// @throws DimensionMismatch if a covariate index is out of range.
Eigen::MatrixXd design_matrix(const LinearModelSpace& space, const Dataset& data);

/// Same, restricted to (possibly repeated) rows.
Eigen::MatrixXd design_matrix(const LinearModelSpace& space,
                              const Dataset& data,
                              std::span<const std::size_t> rows);

/// Maximum-likelihood fit: OLS coefficients through a column-pivoted QR and
/// sigma2 = RSS / n.
///
/// Rejects designs with no residual degrees of freedom (TooFewObservations),
/// rank-deficient designs under RankPolicy::reject (RankDeficient) and fits
/// whose variance falls below 1e-12 * var(y) (DegenerateVariance).
FittedLinearModel fit_mle(const LinearModelSpace& space,
                          const Dataset& data,
                          RankPolicy policy = RankPolicy::reject);

/// Fit from an already assembled design matrix and response.
FittedLinearModel fit_design(const LinearModelSpace& space,
                             const Eigen::MatrixXd& design,
                             const Eigen::VectorXd& y,
                             RankPolicy policy = RankPolicy::reject);

/// Sum of Gaussian log-densities of every row under the fitted model.
double log_likelihood(const FittedLinearModel& model, const Dataset& data);

/// Gaussian log-likelihood from a residual sum of squares.
double gaussian_log_likelihood(double rss, double sigma2, std::size_t n) noexcept;

double log_likelihood(const SpecifiedModel& model, const Dataset& data);

} // namespace evint
