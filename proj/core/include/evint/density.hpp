#pragma once

#include "evint/bootstrap.hpp"

#include <cstddef>
#include <limits>
#include <span>
#include <variant>
#include <vector>

namespace evint {

enum class DensityEstimator
{
  /// Gaussian kernel, Silverman rule-of-thumb bandwidth.
  gaussian_kde,
  /// Local log-quadratic likelihood estimator (Hjort-Jones closed form on top
  /// of the Gaussian kernel estimates of f, f' and f''). For normal data
  /// the smoothing barely inflates the variance.
  log_quadratic,
};

enum class BandwidthRule
{
  silverman,
  /// Direct plug-in rule in the style of Sheather and Jones, with the
  /// asymptotic bias and variance of the local polynomial of the estimator's
  /// degree.
  plugin,
};

struct DensityOptions
{
  DensityEstimator estimator = DensityEstimator::log_quadratic;
  BandwidthRule bandwidth_rule = BandwidthRule::silverman;
  std::size_t grid_points = 512;
  /// Grid extends this many bandwidths past the sample extremes.
  double grid_extension = 3.0;
  /// Fixed bandwidth; NaN selects the bandwidth rule.
  double bandwidth = std::numeric_limits<double>::quiet_NaN();
  /// Known hard limit on one side of the sample's support. The estimate is
  /// then built for log(eps + distance to the limit) and mapped back, so no
  /// mass leaks past it. At most one side may be finite.
  double lower_bound = -std::numeric_limits<double>::infinity();
  double upper_bound = std::numeric_limits<double>::infinity();
};

/// A density tabulated on a grid, normalized so that its trapezoid integral is
/// one, with the matching cumulative distribution.
class SmoothedDensity
{
public:
  /// Normalizes `density` over `grid`. The grid must be strictly increasing,
  /// have at least two points, and the density must be nonnegative with a
  /// positive integral.
  SmoothedDensity(std::vector<double> grid, std::vector<double> density, double bandwidth = 0.0);

  /// Same density on a half-line: the stored grid is the working coordinate
  /// z = log(eps + |bound - x|), with x <= bound when `upper` is set and
  /// x >= bound otherwise.
  SmoothedDensity with_support(double bound, bool upper) &&;

  /// Grid, density and cdf are in the working coordinate for a bounded
  /// density and in the value coordinate otherwise.
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& density() const noexcept { return density_; }
  const std::vector<double>& cdf() const noexcept { return cdf_; }
  double bandwidth() const noexcept { return bandwidth_; }
  bool bounded() const noexcept { return side_ != 0; }
  bool bounded_above() const noexcept { return side_ > 0; }
  /// Value coordinate of a working-grid point; clamps to the bound.
  double value_at(double z) const noexcept;

  /// Density at value t: linear interpolation on the grid (times the
  /// Jacobian when bounded); zero outside the support.
  double pdf(double t) const noexcept;
  /// Probability of values <= t.
  double cdf(double t) const noexcept;

  /// Offset inside the log of the bounded working coordinate.
  static constexpr double kBoundaryOffset = 1e-5;

private:
  double working_pdf(double z) const noexcept;
  double working_cdf(double z) const noexcept;

  int side_ = 0; ///< +1 upper bound, -1 lower bound, 0 unbounded
  double bound_ = 0.0;
  std::vector<double> grid_;
  std::vector<double> density_;
  std::vector<double> cdf_;
  double bandwidth_ = 0.0;
};

/// Stand-in for a density when every bootstrap value coincides.
struct PointMass
{
  double location = 0.0;
};

using Smoothed = std::variant<SmoothedDensity, PointMass>;

/// 0.9 * min(sd, IQR / 1.34) * B^(-1/5), falling back to the standard
/// deviation when the IQR vanishes.
double silverman_bandwidth(std::span<const double> values);

/// Plug-in bandwidth for a local polynomial density estimate of `degree`
/// 0 (plain kernel) or 2 (log-quadratic). Kernel functionals are estimated on
/// a 400-bin linear binning of the sample.
double plugin_bandwidth(std::span<const double> values, int degree = 2);

/// Type-7 (linear interpolation) empirical quantile.
double empirical_quantile(std::span<const double> values, double q);

/// @throws InsufficientSample for fewer than 10 values.
/// @throws DegenerateSample when all values agree to 1e-12 (relative).
SmoothedDensity estimate_density(std::span<const double> values, const DensityOptions& options = {});
SmoothedDensity estimate_density(const EvidenceSample& sample, const DensityOptions& options = {});

/// Like estimate_density, but returns a PointMass instead of throwing
/// DegenerateSample.
Smoothed smooth(std::span<const double> values, const DensityOptions& options = {});
/// Same, honouring the support limits recorded in the sample.
Smoothed smooth(const EvidenceSample& sample, const DensityOptions& options = {});

/// Trapezoid integral of t * f(t).
double smoothed_mean(const SmoothedDensity& density);
double smoothed_mean(const Smoothed& smoothed);

/// Inverse of the stored cdf. Inside a grid cell the density is linear, so
/// the cdf is quadratic and is inverted exactly.
/// @throws QOutOfRange unless 0 < q < 1.
double smoothed_quantile(const SmoothedDensity& density, double q);
double smoothed_quantile(const Smoothed& smoothed, double q);

/// Equal-tailed interval plus the smoothed mean as point estimate.
struct IntervalEstimate
{
  double lower = 0.0;
  double upper = 0.0;
  double point = 0.0;
  double level = 0.0;

  double length() const noexcept { return upper - lower; }
  bool contains(double t) const noexcept { return lower <= t && t <= upper; }
};

IntervalEstimate interval(const Smoothed& smoothed, double level);
IntervalEstimate interval(const EvidenceSample& sample, double level, const DensityOptions& options = {});

} // namespace evint
