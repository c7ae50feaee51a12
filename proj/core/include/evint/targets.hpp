#pragma once

#include "evint/dataset.hpp"
#include "evint/evidence.hpp"
#include "evint/model_family.hpp"
#include "evint/rng.hpp"

#include <Eigen/Dense>

namespace evint {

/// Fixed-design Gaussian linear generator y = [1, X] beta + sigma * e.
struct GaussianLinearGenerator
{
  Eigen::VectorXd beta; ///< intercept then one slope per design column
  double sigma = 1.0;
  RowMatrix design;     ///< n x d covariates, held fixed across draws

  /// @throws ConfigError on non-positive sigma or a beta/design size mismatch.
  void validate() const;

  std::size_t size() const noexcept { return static_cast<std::size_t>(design.rows()); }

  /// Conditional means of every design row.
  Eigen::VectorXd mean() const;

  /// One response draw on the fixed design.
  Dataset draw(Philox4x32& rng) const;

  /// The design as a dataset with the noise-free means as response.
  Dataset mean_dataset() const;
};

/// n x d matrix of i.i.d. N(0, 1) covariates drawn from `seed`.
RowMatrix standard_normal_design(std::size_t n, std::size_t d, std::uint64_t seed);

/// The member of `space` closest to the generator in average Kullback-Leibler
/// divergence over the design rows: least-squares projection of the mean
/// vector, variance inflated by the mean squared approximation error.
///
/// @throws RankDeficient if the space's design columns are collinear.
FittedLinearModel project(const GaussianLinearGenerator& g, const LinearModelSpace& space);

/// Average over design rows of KL(N(mu_g,i, sigma_g^2) || N(mu_m,i, sigma_m^2)).
double kld_fixed_design(const GaussianLinearGenerator& g, const FittedLinearModel& m);

enum class TargetKind
{
  global,
  local,
};

struct TargetValue
{
  double value = 0.0;
  TargetKind kind = TargetKind::global;
  /// The divergence part alone, 2n (K_A - K_R) for global targets or the
  /// unpenalized log-likelihood difference for local ones.
  double divergence_part = 0.0;
};

/// 2n (K(g, M_A) - K(g, M_R)) + c_n (p_A - p_R).
TargetValue global_target(const GaussianLinearGenerator& g,
                          const LinearModelSpace& reference,
                          const LinearModelSpace& alternative,
                          const Penalty& penalty);

/// -2 (l_{m*_A}(data) - l_{m*_R}(data)) + c_n (p_A - p_R) with m* the fixed
/// projections of the generator.
TargetValue local_target(const GaussianLinearGenerator& g,
                         const LinearModelSpace& reference,
                         const LinearModelSpace& alternative,
                         const Dataset& data,
                         const Penalty& penalty);

/// Same, reusing projections computed once per generator.
TargetValue local_target(const FittedLinearModel& projected_reference,
                         const FittedLinearModel& projected_alternative,
                         const Dataset& data,
                         const Penalty& penalty);

} // namespace evint
