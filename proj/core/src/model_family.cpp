#include "evint/model_family.hpp"

#include "evint/errors.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace evint {

LinearModelSpace::LinearModelSpace(std::vector<std::size_t> covariates, bool intercept)
  : covariates_(std::move(covariates))
  , intercept_(intercept)
{
  std::set<std::size_t> seen(covariates_.begin(), covariates_.end());
  if (seen.size() != covariates_.size()) {
    throw ConfigError("model space lists a covariate more than once");
  }
}

LinearModelSpace
LinearModelSpace::from_mask(std::string_view mask)
{
  std::vector<std::size_t> cov;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == '1') {
      cov.push_back(i);
    } else if (mask[i] != '0') {
      throw ConfigError("model mask must contain only '0' and '1'");
    }
  }
  return LinearModelSpace(std::move(cov), true);
}

std::string
LinearModelSpace::label() const
{
  std::ostringstream os;
  os << '{';
  bool first = true;
  if (intercept_) {
    os << "intercept";
    first = false;
  }
  for (auto j : covariates_) {
    os << (first ? "" : ",") << 'x' << (j + 1);
    first = false;
  }
  os << '}';
  return os.str();
}

int
param_count(const LinearModelSpace& space) noexcept
{
  return static_cast<int>(space.coefficient_count()) + 1;
}

double
FittedLinearModel::mean(const Dataset& data, std::size_t i) const
{
  auto row = data.covariates(i);
  Eigen::Index k = 0;
  double mu = 0.0;
  if (space.has_intercept()) {
    mu += beta(k++);
  }
  for (auto j : space.covariates()) {
    mu += beta(k++) * row[j];
  }
  return mu;
}

SpecifiedModel
SpecifiedModel::normal(double mu, double sigma)
{
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma);
  std::ostringstream label;
  label << "N(" << mu << ", " << sigma << "^2)";
  return {[=](double y, std::span<const double>) {
            const double z = (y - mu) / sigma;
            return log_norm - 0.5 * z * z;
          },
          label.str()};
}

SpecifiedModel
SpecifiedModel::from_fit(FittedLinearModel fit)
{
  std::string label = "fixed " + fit.space.label();
  const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * fit.sigma2);
  return {[fit = std::move(fit), log_norm](double y, std::span<const double> x) {
            Eigen::Index k = 0;
            double mu = 0.0;
            if (fit.space.has_intercept()) {
              mu += fit.beta(k++);
            }
            for (auto j : fit.space.covariates()) {
              mu += fit.beta(k++) * x[j];
            }
            const double r = y - mu;
            return log_norm - 0.5 * r * r / fit.sigma2;
          },
          std::move(label)};
}

namespace {

void
check_indices(const LinearModelSpace& space, const Dataset& data)
{
  for (auto j : space.covariates()) {
    if (j >= data.dimension()) {
      throw DimensionMismatch("model uses covariate " + std::to_string(j + 1) +
                              " but data has " + std::to_string(data.dimension()));
    }
  }
}

template <class RowOf>
Eigen::MatrixXd
build_design(const LinearModelSpace& space, const Dataset& data, std::size_t rows, RowOf row_of)
{
  check_indices(space, data);
  const auto n = static_cast<Eigen::Index>(rows);
  const auto k = static_cast<Eigen::Index>(space.coefficient_count());
  Eigen::MatrixXd design(n, k);
  const auto& x = data.covariates();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(row_of(static_cast<std::size_t>(i)));
    Eigen::Index c = 0;
    if (space.has_intercept()) {
      design(i, c++) = 1.0;
    }
    for (auto j : space.covariates()) {
      design(i, c++) = x(r, static_cast<Eigen::Index>(j));
    }
  }
  return design;
}

double
population_variance(const Eigen::VectorXd& y)
{
  const double mean = y.mean();
  return (y.array() - mean).square().mean();
}

} // namespace

Eigen::MatrixXd
design_matrix(const LinearModelSpace& space, const Dataset& data)
{
  return build_design(space, data, data.size(), [](std::size_t i) { return i; });
}

Eigen::MatrixXd
design_matrix(const LinearModelSpace& space,
              const Dataset& data,
              std::span<const std::size_t> rows)
{
  return build_design(space, data, rows.size(), [rows](std::size_t i) { return rows[i]; });
}

FittedLinearModel
fit_design(const LinearModelSpace& space,
           const Eigen::MatrixXd& design,
           const Eigen::VectorXd& y,
           RankPolicy policy)
{
  const auto n = static_cast<std::size_t>(y.size());
  const auto k = static_cast<std::size_t>(design.cols());
  if (n <= k) {
    throw TooFewObservations("need more rows (" + std::to_string(n) +
                             ") than mean coefficients (" + std::to_string(k) + ")");
  }

  FittedLinearModel fit;
  fit.space = space;
  if (k == 0) {
    fit.beta = Eigen::VectorXd();
  } else if (policy == RankPolicy::reject) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (static_cast<std::size_t>(qr.rank()) < k) {
      throw RankDeficient("design matrix for " + space.label() + " is rank deficient");
    }
    fit.beta = qr.solve(y);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    fit.beta = cod.solve(y);
  }

  const double rss = k == 0 ? y.squaredNorm() : (y - design * fit.beta).squaredNorm();
  fit.sigma2 = rss / static_cast<double>(n);
  if (!(fit.sigma2 > 1e-12 * population_variance(y))) {
    throw DegenerateVariance("residual variance of " + space.label() +
                             " is numerically zero");
  }
  return fit;
}

FittedLinearModel
fit_mle(const LinearModelSpace& space, const Dataset& data, RankPolicy policy)
{
  return fit_design(space, design_matrix(space, data), data.response(), policy);
}

double
gaussian_log_likelihood(double rss, double sigma2, std::size_t n) noexcept
{
  const double nn = static_cast<double>(n);
  return -0.5 * nn * std::log(2.0 * std::numbers::pi * sigma2) - rss / (2.0 * sigma2);
}

double
log_likelihood(const FittedLinearModel& model, const Dataset& data)
{
  const Eigen::MatrixXd design = design_matrix(model.space, data);
  const double rss = design.cols() == 0
                       ? data.response().squaredNorm()
                       : (data.response() - design * model.beta).squaredNorm();
  return gaussian_log_likelihood(rss, model.sigma2, data.size());
}

double
log_likelihood(const SpecifiedModel& model, const Dataset& data)
{
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    total += model.log_density(data.response(i), data.covariates(i));
  }
  if (!std::isfinite(total)) {
    throw NonFiniteLikelihood("log-likelihood of " + model.label + " is not finite");
  }
  return total;
}

} // namespace evint
