#pragma once

#include "evint/dataset.hpp"
#include "evint/model_family.hpp"
#include "evint/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace evint {

/// A parametric family h(.; gamma, lambda) with a scalar interest parameter
/// gamma and a nuisance vector lambda of fixed dimension.
class ProfileFamily
{
public:
  virtual ~ProfileFamily() = default;

  virtual std::string name() const = 0;
  virtual std::size_t nuisance_dimension() const = 0;

  /// Full log-likelihood of `data`.
  virtual double log_likelihood(const Dataset& data, double gamma, std::span<const double> lambda) const = 0;

  /// Joint maximum-likelihood estimate; returns gamma and fills `lambda`.
  virtual double mle(const Dataset& data, std::vector<double>& lambda) const = 0;

  /// Closed-form maximizer of the likelihood over lambda at fixed gamma.
  virtual std::vector<double> profile_nuisance(const Dataset& data, double gamma) const = 0;

  /// A sample the size of `data` from h(.; gamma, lambda). Families with
  /// covariates keep the design of `data`.
  virtual Dataset simulate(const Dataset& data,
                           double gamma,
                           std::span<const double> lambda,
                           Philox4x32& rng) const = 0;

  /// True for nuisance components that must stay positive (variances);
  /// the numeric optimizer works on their logarithm.
  virtual std::vector<bool> positive_nuisance() const = 0;

  /// True when gamma is a variance.
  virtual bool positive_interest() const = 0;
};

enum class NormalInterest
{
  mean,     ///< gamma = mu, lambda = (sigma^2)
  variance, ///< gamma = sigma^2, lambda = (mu)
};

/// i.i.d. N(mu, sigma^2) on the response column.
class NormalFamily final : public ProfileFamily
{
public:
  explicit NormalFamily(NormalInterest interest);

  /// Interest mu with the variance fixed, so the nuisance is empty.
  static NormalFamily known_variance(double sigma2);

  std::string name() const override;
  std::size_t nuisance_dimension() const override;
  double log_likelihood(const Dataset& data, double gamma, std::span<const double> lambda) const override;
  double mle(const Dataset& data, std::vector<double>& lambda) const override;
  std::vector<double> profile_nuisance(const Dataset& data, double gamma) const override;
  Dataset simulate(const Dataset& data,
                   double gamma,
                   std::span<const double> lambda,
                   Philox4x32& rng) const override;
  std::vector<bool> positive_nuisance() const override;
  bool positive_interest() const override { return interest_ == NormalInterest::variance; }

private:
  NormalInterest interest_;
  double known_sigma2_ = 0.0; ///< > 0 only for the known-variance family
};

/// Gaussian linear regression on `space`. The interest parameter is either
/// one coefficient (by position in the intercept-first coefficient vector)
/// or the error variance; every other parameter is nuisance.
class RegressionFamily final : public ProfileFamily
{
public:
  static RegressionFamily coefficient(LinearModelSpace space, std::size_t position);
  static RegressionFamily variance(LinearModelSpace space);

  std::string name() const override;
  std::size_t nuisance_dimension() const override;
  double log_likelihood(const Dataset& data, double gamma, std::span<const double> lambda) const override;
  double mle(const Dataset& data, std::vector<double>& lambda) const override;
  std::vector<double> profile_nuisance(const Dataset& data, double gamma) const override;
  Dataset simulate(const Dataset& data,
                   double gamma,
                   std::span<const double> lambda,
                   Philox4x32& rng) const override;
  std::vector<bool> positive_nuisance() const override;
  bool positive_interest() const override { return interest_variance_; }

  const LinearModelSpace& space() const noexcept { return space_; }

private:
  RegressionFamily(LinearModelSpace space, bool interest_variance, std::size_t position);

  /// Mean coefficients and variance from (gamma, lambda).
  void unpack(double gamma, std::span<const double> lambda, Eigen::VectorXd& beta, double& sigma2) const;

  LinearModelSpace space_;
  bool interest_variance_ = false;
  std::size_t position_ = 0;
};

enum class InnerSolver
{
  analytic, ///< the family's closed form
  numeric,  ///< derivative-free maximization from the joint MLE
};

/// Where the parametric bootstrap draws its samples from.
enum class SimulationPoint
{
  joint_mle, ///< h(.; gamma_hat, lambda_hat), the same samples for every gamma
  at_gamma,  ///< h(.; gamma, lambda_hat(gamma))
};

struct ProfileProblem
{
  std::shared_ptr<const ProfileFamily> family;
  Dataset data;
  InnerSolver solver = InnerSolver::analytic;
  SimulationPoint simulation = SimulationPoint::joint_mle;
};

/// Nuisance maximizer at fixed gamma under the problem's solver.
/// @throws OptimizerFailure if the numeric search does not settle.
std::vector<double> maximize_nuisance(const ProfileProblem& problem, const Dataset& data, double gamma);

/// max over lambda of the log-likelihood at gamma.
double profile_loglik(const ProfileProblem& problem, double gamma);

/// Simulation-adjusted profile log-likelihood: the average over B
/// parametric-bootstrap samples of the original-data log-likelihood at
/// (gamma, lambda_b(gamma)), where lambda_b(gamma) is fit to sample b.
/// With an empty nuisance this is exactly profile_loglik.
double adjusted_profile_loglik(const ProfileProblem& problem,
                               double gamma,
                               std::size_t replicates,
                               std::uint64_t seed);

/// 2 l_p - l_SA, the bias-corrected alternative.
double et_adjusted_profile_loglik(const ProfileProblem& problem,
                                  double gamma,
                                  std::size_t replicates,
                                  std::uint64_t seed);

/// All three curves at one gamma, sharing the bootstrap fits.
struct ProfilePoint
{
  double gamma = 0.0;
  double profile = 0.0;
  double adjusted = 0.0;
  double et_adjusted = 0.0;
};

ProfilePoint profile_point(const ProfileProblem& problem,
                           double gamma,
                           std::size_t replicates,
                           std::uint64_t seed);

enum class ProfileCurve
{
  profile,
  adjusted,
  et_adjusted,
};

/// Maximizer of one curve over gamma in [lower, upper] (Brent; on the log
/// scale for variance interests).
/// @throws ConfigError for an empty or invalid bracket.
ProfilePoint maximize_curve(const ProfileProblem& problem,
                            ProfileCurve curve,
                            double lower,
                            double upper,
                            std::size_t replicates,
                            std::uint64_t seed);

} // namespace evint
