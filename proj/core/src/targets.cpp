#include "evint/targets.hpp"

#include "evint/errors.hpp"

#include <cmath>
#include <random>

namespace evint {

void
GaussianLinearGenerator::validate() const
{
  if (!(sigma > 0.0)) {
    throw ConfigError("generator sigma must be positive");
  }
  if (beta.size() != design.cols() + 1) {
    throw ConfigError("generator needs an intercept plus one coefficient per design column");
  }
  if (design.rows() < 1) {
    throw ConfigError("generator design has no rows");
  }
}

Eigen::VectorXd
GaussianLinearGenerator::mean() const
{
  validate();
  Eigen::VectorXd mu = design * beta.tail(design.cols());
  mu.array() += beta(0);
  return mu;
}

Dataset
GaussianLinearGenerator::draw(Philox4x32& rng) const
{
  Eigen::VectorXd y = mean();
  std::normal_distribution<double> noise(0.0, sigma);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y(i) += noise(rng);
  }
  return Dataset(std::move(y), design);
}

Dataset
GaussianLinearGenerator::mean_dataset() const
{
  return Dataset(mean(), design);
}

RowMatrix
standard_normal_design(std::size_t n, std::size_t d, std::uint64_t seed)
{
  Philox4x32 rng(seed, 0);
  std::normal_distribution<double> z(0.0, 1.0);
  RowMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      x(i, j) = z(rng);
    }
  }
  return x;
}

FittedLinearModel
project(const GaussianLinearGenerator& g, const LinearModelSpace& space)
{
  const Dataset means = g.mean_dataset();
  const Eigen::VectorXd& mu = means.response();
  const Eigen::MatrixXd xm = design_matrix(space, means);

  FittedLinearModel m;
  m.space = space;
  double approx_error = 0.0;
  if (xm.cols() == 0) {
    m.beta = Eigen::VectorXd();
    approx_error = mu.squaredNorm();
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xm);
    if (qr.rank() < xm.cols()) {
      throw RankDeficient("design for " + space.label() + " is rank deficient");
    }
    m.beta = qr.solve(mu);
    approx_error = (mu - xm * m.beta).squaredNorm();
  }
  m.sigma2 = g.sigma * g.sigma + approx_error / static_cast<double>(g.size());
  return m;
}

double
kld_fixed_design(const GaussianLinearGenerator& g, const FittedLinearModel& m)
{
  if (!(m.sigma2 > 0.0) || !(g.sigma > 0.0)) {
    throw ConfigError("both variances must be positive");
  }
  const Dataset means = g.mean_dataset();
  const double sg2 = g.sigma * g.sigma;
  const double log_ratio = 0.5 * std::log(m.sigma2 / sg2);
  double total = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double d = means.response(i) - m.mean(means, i);
    total += log_ratio + (sg2 + d * d) / (2.0 * m.sigma2) - 0.5;
  }
  return total / static_cast<double>(means.size());
}

TargetValue
global_target(const GaussianLinearGenerator& g,
              const LinearModelSpace& reference,
              const LinearModelSpace& alternative,
              const Penalty& penalty)
{
  if (reference == alternative) {
    return {0.0, TargetKind::global, 0.0};
  }
  const auto n = g.size();
  const double kr = kld_fixed_design(g, project(g, reference));
  const double ka = kld_fixed_design(g, project(g, alternative));
  const double divergence = 2.0 * static_cast<double>(n) * (ka - kr);
  const double pen =
    penalty(n) * static_cast<double>(param_count(alternative) - param_count(reference));
  return {divergence + pen, TargetKind::global, divergence};
}

TargetValue
local_target(const FittedLinearModel& projected_reference,
             const FittedLinearModel& projected_alternative,
             const Dataset& data,
             const Penalty& penalty)
{
  const double lr = log_likelihood(projected_reference, data);
  const double la = log_likelihood(projected_alternative, data);
  const int pr = param_count(projected_reference.space);
  const int pa = param_count(projected_alternative.space);
  const double divergence = penalized_difference(lr, la, 0.0, pr, pa);
  return {penalized_difference(lr, la, penalty(data.size()), pr, pa), TargetKind::local, divergence};
}

TargetValue
local_target(const GaussianLinearGenerator& g,
             const LinearModelSpace& reference,
             const LinearModelSpace& alternative,
             const Dataset& data,
             const Penalty& penalty)
{
  return local_target(project(g, reference), project(g, alternative), data, penalty);
}

} // namespace evint
