#include "evint/density.hpp"

#include "evint/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace evint {

SmoothedDensity::SmoothedDensity(std::vector<double> grid, std::vector<double> density, double bandwidth)
  : grid_(std::move(grid))
  , density_(std::move(density))
  , bandwidth_(bandwidth)
{
  if (grid_.size() < 2 || grid_.size() != density_.size()) {
    throw InputError("density grid needs at least two points and matching values");
  }
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    if (!(grid_[i] > grid_[i - 1])) {
      throw InputError("density grid must be strictly increasing");
    }
  }
  for (double& f : density_) {
    if (!(f >= 0.0) || !std::isfinite(f)) {
      throw InputError("density values must be finite and nonnegative");
    }
  }

  cdf_.assign(grid_.size(), 0.0);
  for (std::size_t i = 1; i < grid_.size(); ++i) {
    cdf_[i] = cdf_[i - 1] + 0.5 * (grid_[i] - grid_[i - 1]) * (density_[i] + density_[i - 1]);
  }
  const double total = cdf_.back();
  if (!(total > 0.0)) {
    throw InputError("density has zero mass");
  }
  for (auto& f : density_) {
    f /= total;
  }
  for (auto& c : cdf_) {
    c /= total;
  }
  cdf_.back() = 1.0;
}

SmoothedDensity
SmoothedDensity::with_support(double bound, bool upper) &&
{
  side_ = upper ? 1 : -1;
  bound_ = bound;
  return std::move(*this);
}

double
SmoothedDensity::value_at(double z) const noexcept
{
  if (side_ == 0) {
    return z;
  }
  const double dist = std::max(0.0, std::exp(z) - kBoundaryOffset);
  return side_ > 0 ? bound_ - dist : bound_ + dist;
}

double
SmoothedDensity::pdf(double t) const noexcept
{
  if (side_ == 0) {
    return working_pdf(t);
  }
  const double dist = side_ > 0 ? bound_ - t : t - bound_;
  if (dist < 0.0) {
    return 0.0;
  }
  return working_pdf(std::log(kBoundaryOffset + dist)) / (kBoundaryOffset + dist);
}

double
SmoothedDensity::cdf(double t) const noexcept
{
  if (side_ == 0) {
    return working_cdf(t);
  }
  const double dist = side_ > 0 ? bound_ - t : t - bound_;
  // Mass the working grid puts past the offset sits on the bound itself.
  if (side_ > 0 && dist <= 0.0) {
    return 1.0;
  }
  if (dist < 0.0) {
    return 0.0;
  }
  const double c = working_cdf(std::log(kBoundaryOffset + dist));
  return side_ > 0 ? 1.0 - c : c;
}

double
SmoothedDensity::working_pdf(double t) const noexcept
{
  if (t < grid_.front() || t > grid_.back()) {
    return 0.0;
  }
  auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  if (it == grid_.end()) {
    return density_.back();
  }
  const auto i = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double w = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
  return (1.0 - w) * density_[i] + w * density_[i + 1];
}

double
SmoothedDensity::working_cdf(double t) const noexcept
{
  if (t <= grid_.front()) {
    return 0.0;
  }
  if (t >= grid_.back()) {
    return 1.0;
  }
  auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  const auto i = static_cast<std::size_t>(it - grid_.begin()) - 1;
  const double u = t - grid_[i];
  const double slope = (density_[i + 1] - density_[i]) / (grid_[i + 1] - grid_[i]);
  return cdf_[i] + density_[i] * u + 0.5 * slope * u * u;
}

double
empirical_quantile(std::span<const double> values, double q)
{
  if (values.empty()) {
    throw InsufficientSample("quantile of an empty sample");
  }
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace {

double
sample_sd(std::span<const double> values)
{
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  return std::sqrt(ss / (n - 1.0));
}

constexpr double kInvSqrt2Pi = 0.3989422804014327;
// Kernel contributions beyond this many bandwidths are below 1e-21.
constexpr double kKernelCutoff = 10.0;

} // namespace

double
silverman_bandwidth(std::span<const double> values)
{
  if (values.size() < 2) {
    throw InsufficientSample("bandwidth needs at least two values");
  }
  const double sd = sample_sd(values);
  const double iqr = empirical_quantile(values, 0.75) - empirical_quantile(values, 0.25);
  double scale = std::min(sd, iqr / 1.34);
  if (!(scale > 0.0)) {
    scale = sd;
  }
  if (!(scale > 0.0)) {
    scale = std::abs(values[0]) > 0.0 ? std::abs(values[0]) : 1.0;
  }
  return 0.9 * scale * std::pow(static_cast<double>(values.size()), -0.2);
}

namespace {

// k-th derivative of the standard normal density.
double
normal_pdf_derivative(double u, int k)
{
  double he_prev = 1.0; // He_0
  double he = u;        // He_1
  if (k == 0) {
    he = 1.0;
  } else {
    for (int j = 1; j < k; ++j) {
      const double next = u * he - double(j) * he_prev;
      he_prev = he;
      he = next;
    }
  }
  const double sign = (k % 2) != 0 ? -1.0 : 1.0;
  return sign * he * kInvSqrt2Pi * std::exp(-0.5 * u * u);
}

class BinnedSample
{
public:
  BinnedSample(std::span<const double> x, double lower, double upper, std::size_t bins)
    : counts_(bins + 1, 0.0)
    , delta_((upper - lower) / double(bins))
  {
    for (double v : x) {
      const double pos = (v - lower) / delta_;
      auto i = static_cast<std::size_t>(pos);
      if (i >= bins) {
        i = bins - 1;
      }
      const double rem = std::clamp(pos - double(i), 0.0, 1.0);
      counts_[i] += 1.0 - rem;
      counts_[i + 1] += rem;
    }
    total_ = std::accumulate(counts_.begin(), counts_.end(), 0.0);
  }

  const std::vector<double>& counts() const noexcept { return counts_; }

  /// drv-th derivative of the kernel estimate with bandwidth h at every bin
  /// center.
  std::vector<double> derivative(int drv, double h) const
  {
    const std::size_t m = counts_.size();
    const auto reach = std::min<std::size_t>(
      static_cast<std::size_t>(std::floor((4.0 + drv) * h / delta_)), m);
    std::vector<double> kern(reach + 1);
    const double scale = 1.0 / (std::pow(h, drv + 1.0) * total_);
    for (std::size_t l = 0; l <= reach; ++l) {
      kern[l] = normal_pdf_derivative(double(l) * delta_ / h, drv) * scale;
    }
    const double odd = (drv % 2) != 0 ? -1.0 : 1.0;
    std::vector<double> out(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (counts_[i] == 0.0) {
        continue;
      }
      const std::size_t lo = i > reach ? i - reach : 0;
      const std::size_t hi = std::min(m - 1, i + reach);
      // out[j] gets K^(drv)((x_j - x_i) / h)
      for (std::size_t j = lo; j <= hi; ++j) {
        out[j] += counts_[i] * (j >= i ? kern[j - i] : odd * kern[i - j]);
      }
    }
    return out;
  }

  /// Sample average of a function tabulated at the bin centers.
  double average(const std::vector<double>& f) const
  {
    double s = 0.0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      if (counts_[i] != 0.0) {
        s += counts_[i] * f[i];
      }
    }
    return s / total_;
  }

private:
  std::vector<double> counts_;
  double delta_;
  double total_ = 0.0;
};

double
robust_scale(std::span<const double> values)
{
  const double sd = sample_sd(values);
  const double iqr = empirical_quantile(values, 0.75) - empirical_quantile(values, 0.25);
  double scale = std::min(iqr / 1.349, sd);
  if (!(scale > 0.0)) {
    scale = sd > 0.0 ? sd : 1.0;
  }
  return scale;
}

// Bandwidth for estimating the density functional of derivative order drv
// (even), one normal-reference stage followed by one plug-in stage.
double
functional_bandwidth(const BinnedSample& bins, double scale, double n, int drv)
{
  int r = drv + 4;
  double psi = ((r / 2) % 2 == 0) ? 1.0 : -1.0;
  psi *= std::tgamma(r + 1.0);
  psi /= std::pow(2.0 * scale, r + 1.0) * std::tgamma(r / 2 + 1.0) * std::sqrt(std::numbers::pi);
  double kr = normal_pdf_derivative(0.0, r - 2);
  const double pilot = std::pow(-2.0 * kr / (psi * n), 1.0 / (r + 1.0));

  r -= 2;
  psi = bins.average(bins.derivative(drv + 2, pilot));
  kr = normal_pdf_derivative(0.0, r - 2);
  return std::pow(-2.0 * kr / (psi * n), 1.0 / (r + 1.0));
}

} // namespace

double
plugin_bandwidth(std::span<const double> values, int degree)
{
  if (values.size() < 2) {
    throw InsufficientSample("bandwidth needs at least two values");
  }
  if (degree != 0 && degree != 2) {
    throw ConfigError("plug-in bandwidth supports degree 0 or 2");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  const double scale = robust_scale(values);
  const int power = degree == 0 ? 4 : 8;
  const double fallback = 4.0 * 1.06 * scale * std::pow(n, -1.0 / (power + 1.0));
  if (!(*hi > *lo)) {
    return fallback;
  }

  const BinnedSample bins(values, *lo, *hi, 400);
  double ibias2 = 0.0;
  if (degree == 0) {
    const double h = functional_bandwidth(bins, scale, n, 4);
    const auto f4 = bins.derivative(4, h);
    std::vector<double> arg(f4.size());
    for (std::size_t i = 0; i < arg.size(); ++i) {
      arg[i] = 0.25 * f4[i];
    }
    ibias2 = bins.average(arg);
  } else {
    const double h = functional_bandwidth(bins, scale, n, 8);
    const auto f0 = bins.derivative(0, h);
    const auto f1 = bins.derivative(1, h);
    const auto f2 = bins.derivative(2, h);
    const auto f4 = bins.derivative(4, h);
    std::vector<double> arg(f0.size(), 0.0);
    for (std::size_t i = 0; i < arg.size(); ++i) {
      if (!(f0[i] > 0.0)) {
        continue;
      }
      const double a = f4[i] - 3.0 * f2[i] * f2[i] / f0[i] + 2.0 * std::pow(f1[i], 4) / std::pow(f0[i], 3);
      arg[i] = (0.125 * a) * (0.125 * a) / f0[i];
    }
    ibias2 = bins.average(arg);
  }
  const double ivar = (degree == 0 ? 1.0 : 27.0 / 16.0) * 0.5 / std::sqrt(std::numbers::pi);
  const double h = std::pow(ivar / (power * n * ibias2), 1.0 / (power + 1.0));
  return std::isfinite(h) && h > 0.0 ? h : fallback;
}

SmoothedDensity
estimate_density(std::span<const double> values, const DensityOptions& options)
{
  if (values.size() < 10) {
    throw InsufficientSample("density estimation needs at least 10 values, got " +
                             std::to_string(values.size()));
  }
  if (options.grid_points < 2) {
    throw ConfigError("density grid needs at least two points");
  }
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw InputError("sample contains non-finite values");
    }
  }
  const double lo = x.front();
  const double hi = x.back();
  if (hi - lo <= 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)))) {
    throw DegenerateSample(0.5 * (lo + hi));
  }

  const bool has_lower = std::isfinite(options.lower_bound);
  const bool has_upper = std::isfinite(options.upper_bound);
  if (has_lower && has_upper) {
    throw ConfigError("only one side of the support may be bounded");
  }
  if (has_lower || has_upper) {
    // Values past the limit can only be rounding error.
    const double b = has_upper ? options.upper_bound : options.lower_bound;
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double dist = std::max(0.0, has_upper ? b - x[i] : x[i] - b);
      z[i] = std::log(SmoothedDensity::kBoundaryOffset + dist);
    }
    DensityOptions inner = options;
    inner.lower_bound = -std::numeric_limits<double>::infinity();
    inner.upper_bound = std::numeric_limits<double>::infinity();
    return estimate_density(z, inner).with_support(b, has_upper);
  }

  const bool quadratic = options.estimator == DensityEstimator::log_quadratic;
  double h = options.bandwidth;
  if (std::isnan(h)) {
    h = options.bandwidth_rule == BandwidthRule::plugin ? plugin_bandwidth(x, quadratic ? 2 : 0) : silverman_bandwidth(x);
  }
  if (!(h > 0.0)) {
    throw ConfigError("bandwidth must be positive");
  }

  const std::size_t m = options.grid_points;
  const double g0 = lo - options.grid_extension * h;
  const double g1 = hi + options.grid_extension * h;
  const double step = (g1 - g0) / static_cast<double>(m - 1);
  std::vector<double> grid(m);
  for (std::size_t k = 0; k < m; ++k) {
    grid[k] = g0 + step * static_cast<double>(k);
  }
  grid.back() = g1;

  const double inv_h = 1.0 / h;
  const double norm = 1.0 / (static_cast<double>(x.size()) * h);
  std::vector<double> dens(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double g = grid[k];
    auto first = std::lower_bound(x.begin(), x.end(), g - kKernelCutoff * h);
    auto last = std::upper_bound(first, x.end(), g + kKernelCutoff * h);
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (auto it = first; it != last; ++it) {
      const double u = (g - *it) * inv_h;
      const double k0 = kInvSqrt2Pi * std::exp(-0.5 * u * u);
      s0 += k0;
      if (quadratic) {
        s1 -= u * k0;
        s2 += (u * u - 1.0) * k0;
      }
    }
    const double f0 = norm * s0;
    if (!quadratic) {
      dens[k] = f0;
      continue;
    }
    if (!(f0 > 0.0)) {
      dens[k] = 0.0;
      continue;
    }
    const double f1 = norm * inv_h * s1;
    const double f2 = norm * inv_h * inv_h * s2;
    const double b = f1 / f0;
    const double d = f2 / f0 - b * b;
    // No local log-quadratic fit exists where 1 + h^2 d <= 0 (an isolated
    // point in a sparse tail, for one); keep the kernel value there.
    const double denom = 1.0 + h * h * d;
    if (!(denom > 0.0)) {
      dens[k] = f0;
      continue;
    }
    const double r2 = 1.0 / denom;
    const double v = f0 * std::sqrt(r2) * std::exp(-0.5 * h * h * b * b * r2);
    dens[k] = std::isfinite(v) ? v : 0.0;
  }
  return SmoothedDensity(std::move(grid), std::move(dens), h);
}

SmoothedDensity
estimate_density(const EvidenceSample& sample, const DensityOptions& options)
{
  DensityOptions o = options;
  o.lower_bound = std::max(o.lower_bound, sample.lower_bound);
  o.upper_bound = std::min(o.upper_bound, sample.upper_bound);
  return estimate_density(std::span<const double>(sample.values), o);
}

Smoothed
smooth(std::span<const double> values, const DensityOptions& options)
{
  try {
    return estimate_density(values, options);
  } catch (const DegenerateSample& e) {
    return PointMass{e.location()};
  }
}

Smoothed
smooth(const EvidenceSample& sample, const DensityOptions& options)
{
  DensityOptions o = options;
  o.lower_bound = std::max(o.lower_bound, sample.lower_bound);
  o.upper_bound = std::min(o.upper_bound, sample.upper_bound);
  return smooth(std::span<const double>(sample.values), o);
}

double
smoothed_mean(const SmoothedDensity& d)
{
  const auto& g = d.grid();
  const auto& f = d.density();
  double total = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    total += 0.5 * (g[i] - g[i - 1]) * (d.value_at(g[i]) * f[i] + d.value_at(g[i - 1]) * f[i - 1]);
  }
  return total;
}

double
smoothed_mean(const Smoothed& s)
{
  if (const auto* pm = std::get_if<PointMass>(&s)) {
    return pm->location;
  }
  return smoothed_mean(std::get<SmoothedDensity>(s));
}

namespace {

double
working_quantile(const SmoothedDensity& d, double q)
{
  const auto& g = d.grid();
  const auto& f = d.density();
  const auto& c = d.cdf();

  // First cell [i, i+1] with c[i] <= q < c[i+1].
  auto it = std::upper_bound(c.begin(), c.end(), q);
  std::size_t i = static_cast<std::size_t>(it - c.begin());
  i = std::clamp<std::size_t>(i, 1, g.size() - 1) - 1;

  const double r = q - c[i];
  const double width = g[i + 1] - g[i];
  const double slope = (f[i + 1] - f[i]) / width;
  double u;
  if (f[i] == 0.0 && f[i + 1] == 0.0) {
    const double dc = c[i + 1] - c[i];
    u = dc > 0.0 ? width * r / dc : 0.0;
  } else {
    // Stable root of slope/2 u^2 + f_i u - r = 0.
    const double disc = std::max(0.0, f[i] * f[i] + 2.0 * slope * r);
    u = 2.0 * r / (f[i] + std::sqrt(disc));
  }
  return g[i] + std::clamp(u, 0.0, width);
}

} // namespace

double
smoothed_quantile(const SmoothedDensity& d, double q)
{
  if (!(q > 0.0 && q < 1.0)) {
    throw QOutOfRange("quantile level must lie strictly between 0 and 1");
  }
  if (!d.bounded()) {
    return working_quantile(d, q);
  }
  // Distance to the bound grows with z, so an upper bound flips the tail.
  return d.value_at(working_quantile(d, d.bounded_above() ? 1.0 - q : q));
}

double
smoothed_quantile(const Smoothed& s, double q)
{
  if (const auto* pm = std::get_if<PointMass>(&s)) {
    if (!(q > 0.0 && q < 1.0)) {
      throw QOutOfRange("quantile level must lie strictly between 0 and 1");
    }
    return pm->location;
  }
  return smoothed_quantile(std::get<SmoothedDensity>(s), q);
}

IntervalEstimate
interval(const Smoothed& s, double level)
{
  if (!(level > 0.0 && level < 1.0)) {
    throw QOutOfRange("interval level must lie strictly between 0 and 1");
  }
  const double tail = 0.5 * (1.0 - level);
  return {smoothed_quantile(s, tail), smoothed_quantile(s, 1.0 - tail), smoothed_mean(s), level};
}

IntervalEstimate
interval(const EvidenceSample& sample, double level, const DensityOptions& options)
{
  return interval(smooth(sample, options), level);
}

} // namespace evint
