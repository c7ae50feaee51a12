#include "evint/profile.hpp"

#include "evint/errors.hpp"
#include "evint/parallel.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

namespace evint {

namespace {

double
normal_loglik(double rss, double sigma2, std::size_t n)
{
  return gaussian_log_likelihood(rss, sigma2, n);
}

double
sum_sq_dev(const Eigen::VectorXd& y, double centre)
{
  return (y.array() - centre).square().sum();
}

void
require_variance(double v, const char* what)
{
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DegenerateVariance(std::string(what) + " is not a positive finite variance");
  }
}

using Objective = std::function<double(const std::vector<double>&)>;

/// Brent on one coordinate after walking out a bracket from x0.
double
minimize_1d(const std::function<double(double)>& f, double x0)
{
  double step = 0.1 * std::max(1.0, std::abs(x0));
  double a = x0 - step;
  double c = x0 + step;
  double fa = f(a);
  double fb = f(x0);
  double fc = f(c);
  for (int i = 0; i < 200 && !(fb <= fa && fb <= fc); ++i) {
    step *= 2.0;
    if (fa < fb) {
      c = x0;
      fc = fb;
      x0 = a;
      fb = fa;
      a = x0 - step;
      fa = f(a);
    } else {
      a = x0;
      fa = fb;
      x0 = c;
      fb = fc;
      c = x0 + step;
      fc = f(c);
    }
  }
  if (!(fb <= fa && fb <= fc)) {
    throw OptimizerFailure("could not bracket the nuisance maximum");
  }
  std::uintmax_t iters = 500;
  const auto r = boost::math::tools::brent_find_minima(f, a, c, std::numeric_limits<double>::digits, iters);
  if (iters >= 500 || !std::isfinite(r.second)) {
    throw OptimizerFailure("Brent search did not converge");
  }
  return r.first;
}

/// Nelder-Mead simplex search.
std::vector<double>
minimize_nd(const Objective& f, std::vector<double> x0)
{
  const std::size_t d = x0.size();
  for (int restart = 0; restart < 3; ++restart) {
    std::vector<std::vector<double>> pts(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i) {
      pts[i + 1][i] += 0.1 * std::max(1.0, std::abs(x0[i]));
    }
    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i <= d; ++i) {
      fv[i] = f(pts[i]);
    }
    bool converged = false;
    for (std::size_t iter = 0; iter < 5000 * d; ++iter) {
      std::vector<std::size_t> order(d + 1);
      for (std::size_t i = 0; i <= d; ++i) {
        order[i] = i;
      }
      std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fv[a] < fv[b]; });
      const auto best = order.front();
      const auto worst = order.back();
      const auto second = order[d - 1];

      double spread = 0.0;
      for (std::size_t i = 0; i <= d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          spread = std::max(spread, std::abs(pts[i][j] - pts[best][j]) / (1.0 + std::abs(pts[best][j])));
        }
      }
      if (std::abs(fv[worst] - fv[best]) <= 1e-14 * (1.0 + std::abs(fv[best])) && spread < 1e-9) {
        converged = true;
        x0 = pts[best];
        break;
      }

      std::vector<double> centroid(d, 0.0);
      for (std::size_t i = 0; i <= d; ++i) {
        if (i == worst) {
          continue;
        }
        for (std::size_t j = 0; j < d; ++j) {
          centroid[j] += pts[i][j] / static_cast<double>(d);
        }
      }
      auto along = [&](double t) {
        std::vector<double> p(d);
        for (std::size_t j = 0; j < d; ++j) {
          p[j] = centroid[j] + t * (pts[worst][j] - centroid[j]);
        }
        return p;
      };
      auto reflected = along(-1.0);
      const double fr = f(reflected);
      if (fr < fv[best]) {
        auto expanded = along(-2.0);
        const double fe = f(expanded);
        if (fe < fr) {
          pts[worst] = std::move(expanded);
          fv[worst] = fe;
        } else {
          pts[worst] = std::move(reflected);
          fv[worst] = fr;
        }
      } else if (fr < fv[second]) {
        pts[worst] = std::move(reflected);
        fv[worst] = fr;
      } else {
        auto contracted = fr < fv[worst] ? along(-0.5) : along(0.5);
        const double fc = f(contracted);
        if (fc < std::min(fr, fv[worst])) {
          pts[worst] = std::move(contracted);
          fv[worst] = fc;
        } else {
          for (std::size_t i = 0; i <= d; ++i) {
            if (i == best) {
              continue;
            }
            for (std::size_t j = 0; j < d; ++j) {
              pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
            }
            fv[i] = f(pts[i]);
          }
        }
      }
      x0 = pts[best];
    }
    if (converged && restart > 0) {
      return x0;
    }
    // Always restart at least once from the reported optimum; simplex
    // searches can stall on a ridge.
  }
  throw OptimizerFailure("simplex search did not converge");
}

} // namespace

// ---- NormalFamily -------------------------------------------------------

NormalFamily::NormalFamily(NormalInterest interest)
  : interest_(interest)
{}

NormalFamily
NormalFamily::known_variance(double sigma2)
{
  if (!(sigma2 > 0.0)) {
    throw ConfigError("known variance must be positive");
  }
  NormalFamily f(NormalInterest::mean);
  f.known_sigma2_ = sigma2;
  return f;
}

std::string
NormalFamily::name() const
{
  if (known_sigma2_ > 0.0) {
    return "normal-known-variance";
  }
  return interest_ == NormalInterest::mean ? "normal-mean" : "normal-variance";
}

std::size_t
NormalFamily::nuisance_dimension() const
{
  return known_sigma2_ > 0.0 ? 0 : 1;
}

double
NormalFamily::log_likelihood(const Dataset& data, double gamma, std::span<const double> lambda) const
{
  if (lambda.size() != nuisance_dimension()) {
    throw DimensionMismatch("wrong nuisance dimension for " + name());
  }
  const auto& y = data.response();
  double mu = gamma;
  double s2 = 0.0;
  if (known_sigma2_ > 0.0) {
    s2 = known_sigma2_;
  } else if (interest_ == NormalInterest::mean) {
    s2 = lambda[0];
  } else {
    mu = lambda[0];
    s2 = gamma;
  }
  if (!(s2 > 0.0)) {
    return -std::numeric_limits<double>::infinity();
  }
  return normal_loglik(sum_sq_dev(y, mu), s2, data.size());
}

double
NormalFamily::mle(const Dataset& data, std::vector<double>& lambda) const
{
  const auto& y = data.response();
  const double mean = y.mean();
  const double s2 = sum_sq_dev(y, mean) / static_cast<double>(data.size());
  if (known_sigma2_ > 0.0) {
    lambda.clear();
    return mean;
  }
  require_variance(s2, "sample variance");
  if (interest_ == NormalInterest::mean) {
    lambda = {s2};
    return mean;
  }
  lambda = {mean};
  return s2;
}

std::vector<double>
NormalFamily::profile_nuisance(const Dataset& data, double gamma) const
{
  if (known_sigma2_ > 0.0) {
    return {};
  }
  const auto& y = data.response();
  if (interest_ == NormalInterest::mean) {
    const double s2 = sum_sq_dev(y, gamma) / static_cast<double>(data.size());
    require_variance(s2, "profile variance");
    return {s2};
  }
  return {y.mean()};
}

Dataset
NormalFamily::simulate(const Dataset& data, double gamma, std::span<const double> lambda, Philox4x32& rng) const
{
  double mu = gamma;
  double s2 = known_sigma2_;
  if (known_sigma2_ <= 0.0) {
    if (interest_ == NormalInterest::mean) {
      s2 = lambda[0];
    } else {
      mu = lambda[0];
      s2 = gamma;
    }
  }
  require_variance(s2, "simulation variance");
  std::normal_distribution<double> z(mu, std::sqrt(s2));
  Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y(i) = z(rng);
  }
  return data.with_response(std::move(y));
}

std::vector<bool>
NormalFamily::positive_nuisance() const
{
  if (known_sigma2_ > 0.0) {
    return {};
  }
  return {interest_ == NormalInterest::mean};
}

// ---- RegressionFamily ---------------------------------------------------

RegressionFamily::RegressionFamily(LinearModelSpace space, bool interest_variance, std::size_t position)
  : space_(std::move(space))
  , interest_variance_(interest_variance)
  , position_(position)
{}

RegressionFamily
RegressionFamily::coefficient(LinearModelSpace space, std::size_t position)
{
  if (position >= space.coefficient_count()) {
    throw ConfigError("interest coefficient position is outside the model");
  }
  return RegressionFamily(std::move(space), false, position);
}

RegressionFamily
RegressionFamily::variance(LinearModelSpace space)
{
  return RegressionFamily(std::move(space), true, 0);
}

std::string
RegressionFamily::name() const
{
  if (interest_variance_) {
    return "regression-variance";
  }
  return "regression-coefficient-" + std::to_string(position_);
}

std::size_t
RegressionFamily::nuisance_dimension() const
{
  // Either every coefficient, or all but one plus the variance.
  return space_.coefficient_count();
}

void
RegressionFamily::unpack(double gamma, std::span<const double> lambda, Eigen::VectorXd& beta, double& sigma2) const
{
  if (lambda.size() != nuisance_dimension()) {
    throw DimensionMismatch("wrong nuisance dimension for " + name());
  }
  const auto k = static_cast<Eigen::Index>(space_.coefficient_count());
  beta.resize(k);
  if (interest_variance_) {
    for (Eigen::Index i = 0; i < k; ++i) {
      beta(i) = lambda[static_cast<std::size_t>(i)];
    }
    sigma2 = gamma;
    return;
  }
  std::size_t src = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    beta(i) = static_cast<std::size_t>(i) == position_ ? gamma : lambda[src++];
  }
  sigma2 = lambda.back();
}

double
RegressionFamily::log_likelihood(const Dataset& data, double gamma, std::span<const double> lambda) const
{
  Eigen::VectorXd beta;
  double s2 = 0.0;
  unpack(gamma, lambda, beta, s2);
  if (!(s2 > 0.0)) {
    return -std::numeric_limits<double>::infinity();
  }
  const auto x = design_matrix(space_, data);
  const double rss = x.cols() == 0 ? data.response().squaredNorm()
                                   : (data.response() - x * beta).squaredNorm();
  return normal_loglik(rss, s2, data.size());
}

double
RegressionFamily::mle(const Dataset& data, std::vector<double>& lambda) const
{
  const auto fit = fit_mle(space_, data);
  lambda.clear();
  if (interest_variance_) {
    lambda.assign(fit.beta.data(), fit.beta.data() + fit.beta.size());
    return fit.sigma2;
  }
  for (Eigen::Index i = 0; i < fit.beta.size(); ++i) {
    if (static_cast<std::size_t>(i) != position_) {
      lambda.push_back(fit.beta(i));
    }
  }
  lambda.push_back(fit.sigma2);
  return fit.beta(static_cast<Eigen::Index>(position_));
}

std::vector<double>
RegressionFamily::profile_nuisance(const Dataset& data, double gamma) const
{
  if (interest_variance_) {
    std::vector<double> lambda;
    mle(data, lambda);
    return lambda;
  }
  const auto x = design_matrix(space_, data);
  const auto j = static_cast<Eigen::Index>(position_);
  const Eigen::VectorXd y = data.response() - gamma * x.col(j);

  Eigen::MatrixXd rest(x.rows(), x.cols() - 1);
  for (Eigen::Index c = 0, r = 0; c < x.cols(); ++c) {
    if (c != j) {
      rest.col(r++) = x.col(c);
    }
  }
  std::vector<double> lambda;
  double rss = y.squaredNorm();
  if (rest.cols() > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(rest);
    if (qr.rank() < rest.cols()) {
      throw RankDeficient("nuisance design is rank deficient");
    }
    const Eigen::VectorXd b = qr.solve(y);
    rss = (y - rest * b).squaredNorm();
    lambda.assign(b.data(), b.data() + b.size());
  }
  const double s2 = rss / static_cast<double>(data.size());
  require_variance(s2, "profile variance");
  lambda.push_back(s2);
  return lambda;
}

Dataset
RegressionFamily::simulate(const Dataset& data, double gamma, std::span<const double> lambda, Philox4x32& rng) const
{
  Eigen::VectorXd beta;
  double s2 = 0.0;
  unpack(gamma, lambda, beta, s2);
  require_variance(s2, "simulation variance");
  const auto x = design_matrix(space_, data);
  Eigen::VectorXd y = x.cols() == 0 ? Eigen::VectorXd::Zero(x.rows()) : Eigen::VectorXd(x * beta);
  std::normal_distribution<double> z(0.0, std::sqrt(s2));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y(i) += z(rng);
  }
  return data.with_response(std::move(y));
}

std::vector<bool>
RegressionFamily::positive_nuisance() const
{
  std::vector<bool> pos(nuisance_dimension(), false);
  if (!interest_variance_) {
    pos.back() = true;
  }
  return pos;
}

// ---- profile computations ----------------------------------------------

std::vector<double>
maximize_nuisance(const ProfileProblem& problem, const Dataset& data, double gamma)
{
  const auto& fam = *problem.family;
  const std::size_t d = fam.nuisance_dimension();
  if (d == 0) {
    return {};
  }
  if (problem.solver == InnerSolver::analytic) {
    return fam.profile_nuisance(data, gamma);
  }

  std::vector<double> start;
  fam.mle(data, start);
  const auto positive = fam.positive_nuisance();
  auto to_natural = [&](const std::vector<double>& t) {
    std::vector<double> lam(t);
    for (std::size_t i = 0; i < d; ++i) {
      if (positive[i]) {
        lam[i] = std::exp(t[i]);
      }
    }
    return lam;
  };
  std::vector<double> t0(start);
  for (std::size_t i = 0; i < d; ++i) {
    if (positive[i]) {
      t0[i] = std::log(start[i]);
    }
  }
  const Objective negll = [&](const std::vector<double>& t) {
    const double v = fam.log_likelihood(data, gamma, to_natural(t));
    return std::isfinite(v) ? -v : std::numeric_limits<double>::max();
  };

  std::vector<double> best;
  if (d == 1) {
    const double t = minimize_1d([&](double u) { return negll({u}); }, t0[0]);
    best = {t};
  } else {
    best = minimize_nd(negll, t0);
  }
  return to_natural(best);
}

double
profile_loglik(const ProfileProblem& problem, double gamma)
{
  const auto lambda = maximize_nuisance(problem, problem.data, gamma);
  const double v = problem.family->log_likelihood(problem.data, gamma, lambda);
  if (!std::isfinite(v)) {
    throw NonFiniteLikelihood("profile log-likelihood is not finite at gamma = " + std::to_string(gamma));
  }
  return v;
}

ProfilePoint
profile_point(const ProfileProblem& problem, double gamma, std::size_t replicates, std::uint64_t seed)
{
  if (!problem.family) {
    throw ConfigError("profile problem has no family");
  }
  if (replicates < 1) {
    throw ConfigError("replicate count must be at least 1");
  }
  ProfilePoint p;
  p.gamma = gamma;
  p.profile = profile_loglik(problem, gamma);
  const auto& fam = *problem.family;
  if (fam.nuisance_dimension() == 0) {
    p.adjusted = p.profile;
    p.et_adjusted = p.profile;
    return p;
  }

  std::vector<double> sim_lambda;
  double sim_gamma = fam.mle(problem.data, sim_lambda);
  if (problem.simulation == SimulationPoint::at_gamma) {
    sim_gamma = gamma;
    sim_lambda = maximize_nuisance(problem, problem.data, gamma);
  }

  std::vector<double> terms(replicates);
  parallel_for(replicates, 0, [&](std::size_t b) {
    Philox4x32 rng(seed, b);
    const auto xb = fam.simulate(problem.data, sim_gamma, sim_lambda, rng);
    const auto lambda_b = maximize_nuisance(problem, xb, gamma);
    terms[b] = fam.log_likelihood(problem.data, gamma, lambda_b);
  });
  double sum = 0.0;
  for (double t : terms) {
    sum += t;
  }
  p.adjusted = sum / static_cast<double>(replicates);
  if (!std::isfinite(p.adjusted)) {
    throw NonFiniteLikelihood("adjusted profile log-likelihood is not finite");
  }
  p.et_adjusted = 2.0 * p.profile - p.adjusted;
  return p;
}

double
adjusted_profile_loglik(const ProfileProblem& problem, double gamma, std::size_t replicates, std::uint64_t seed)
{
  return profile_point(problem, gamma, replicates, seed).adjusted;
}

double
et_adjusted_profile_loglik(const ProfileProblem& problem, double gamma, std::size_t replicates, std::uint64_t seed)
{
  return profile_point(problem, gamma, replicates, seed).et_adjusted;
}

ProfilePoint
maximize_curve(const ProfileProblem& problem,
               ProfileCurve curve,
               double lower,
               double upper,
               std::size_t replicates,
               std::uint64_t seed)
{
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw ConfigError("interest bracket must satisfy lower < upper");
  }
  const bool log_scale = problem.family->positive_interest();
  if (log_scale && !(lower > 0.0)) {
    throw ConfigError("variance interest bracket must be positive");
  }
  auto value = [&](const ProfilePoint& p) {
    switch (curve) {
      case ProfileCurve::profile:
        return p.profile;
      case ProfileCurve::adjusted:
        return p.adjusted;
      case ProfileCurve::et_adjusted:
        return p.et_adjusted;
    }
    return p.profile;
  };
  auto eval = [&](double u) {
    const double g = log_scale ? std::exp(u) : u;
    if (curve == ProfileCurve::profile) {
      return -profile_loglik(problem, g);
    }
    return -value(profile_point(problem, g, replicates, seed));
  };
  const double a = log_scale ? std::log(lower) : lower;
  const double c = log_scale ? std::log(upper) : upper;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima(eval, a, c, 40, iters);
  if (iters >= 200) {
    throw OptimizerFailure("interest maximization did not converge");
  }
  const double g = log_scale ? std::exp(r.first) : r.first;
  return profile_point(problem, g, replicates, seed);
}

} // namespace evint
