#include "evint/density.hpp"
#include "evint/errors.hpp"
#include "evint/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace evint;

namespace {

std::vector<double>
normal_draws(std::size_t n, double mu, double sd, std::uint64_t seed)
{
  Philox4x32 g(seed, 0);
  std::normal_distribution<double> z(mu, sd);
  std::vector<double> v(n);
  for (auto& x : v) {
    x = z(g);
  }
  return v;
}

double
trapezoid(const SmoothedDensity& d)
{
  double s = 0.0;
  for (std::size_t i = 1; i < d.grid().size(); ++i) {
    s += 0.5 * (d.grid()[i] - d.grid()[i - 1]) * (d.density()[i] + d.density()[i - 1]);
  }
  return s;
}

} // namespace

TEST_CASE("density: constant sample is degenerate with its location")
{
  const std::vector<double> v(50, 3.25);
  try {
    estimate_density(v);
    FAIL("expected DegenerateSample");
  } catch (const DegenerateSample& e) {
    CHECK(e.location() == 3.25);
  }
  const auto s = smooth(v);
  REQUIRE(std::holds_alternative<PointMass>(s));
  CHECK(smoothed_mean(s) == 3.25);
  const auto iv = interval(s, 0.9);
  CHECK(iv.lower == 3.25);
  CHECK(iv.upper == 3.25);
  CHECK(iv.point == 3.25);
}

TEST_CASE("density: too few values")
{
  CHECK_THROWS_AS(estimate_density(std::vector<double>{1, 2, 3}), InsufficientSample);
}

TEST_CASE("density: standard normal height at zero")
{
  const auto v = normal_draws(100000, 0.0, 1.0, 1);
  const auto d = estimate_density(v);
  CHECK(std::abs(d.pdf(0.0) - 0.39894) < 0.02);
  CHECK(d.grid().size() == 512);
  CHECK(d.grid().front() == doctest::Approx(*std::min_element(v.begin(), v.end()) - 3 * d.bandwidth()));
  CHECK(d.grid().back() == doctest::Approx(*std::max_element(v.begin(), v.end()) + 3 * d.bandwidth()));
}

TEST_CASE("density: symmetric input gives a symmetric estimate")
{
  auto v = normal_draws(2000, 0.0, 1.0, 2);
  const std::size_t half = v.size();
  for (std::size_t i = 0; i < half; ++i) {
    v.push_back(10.0 - v[i]);
  }
  const auto d = estimate_density(v);
  const auto& g = d.grid();
  const auto& f = d.density();
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(std::abs(f[k] - f[g.size() - 1 - k]) < 1e-6);
  }
  CHECK(std::abs(smoothed_mean(d) - 5.0) < 1e-6);
  CHECK(std::abs(smoothed_quantile(d, 0.5) - 5.0) < 1e-6);
}

TEST_CASE("density: invariants on assorted samples")
{
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto v = normal_draws(500 + 100 * s, double(s), 1.0 + double(s % 4), s);
    if (s % 3 == 0) {
      for (auto& x : v) {
        x = std::exp(0.5 * x / (1.0 + double(s % 4)));
      }
    }
    for (auto est : {DensityEstimator::gaussian_kde, DensityEstimator::log_quadratic}) {
      DensityOptions o;
      o.estimator = est;
      const auto d = estimate_density(v, o);
      CHECK(std::abs(trapezoid(d) - 1.0) < 1e-6);
      for (double f : d.density()) {
        CHECK(f >= 0.0);
      }
      CHECK(std::abs(d.cdf().front()) < 1e-9);
      CHECK(std::abs(d.cdf().back() - 1.0) < 1e-9);
      CHECK(std::is_sorted(d.cdf().begin(), d.cdf().end()));
      // The quantile function inverts the stored cdf at grid points.
      for (std::size_t k = 1; k + 1 < d.grid().size(); k += 37) {
        const double q = d.cdf()[k];
        if (q > 1e-9 && q < 1 - 1e-9 && d.density()[k] > 1e-8) {
          CHECK(std::abs(smoothed_quantile(d, q) - d.grid()[k]) < 1e-8 * (1 + std::abs(d.grid()[k])));
        }
      }
      double prev = -INFINITY;
      for (double q = 0.001; q < 1.0; q += 0.0125) {
        const double x = smoothed_quantile(d, q);
        CHECK(x > prev);
        prev = x;
      }
    }
  }
}

TEST_CASE("density: smoothed mean tracks the sample mean")
{
  const auto v = normal_draws(50000, 2.0, 3.0, 3);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  const auto d = estimate_density(v);
  CHECK(std::abs(smoothed_mean(d) - mean) < 3.0 * 3.0 / std::sqrt(double(v.size())));
}

TEST_CASE("density: normal quantiles")
{
  const auto v = normal_draws(100000, 0.0, 1.0, 4);
  const auto d = estimate_density(v);
  CHECK(std::abs(smoothed_quantile(d, 0.05) + 1.645) < 0.03);

  const auto w = normal_draws(100000, 10.0, 2.0, 5);
  const auto iv = interval(smooth(w), 0.9);
  CHECK(std::abs(iv.lower - 6.71) < 0.1);
  CHECK(std::abs(iv.upper - 13.29) < 0.1);
}

TEST_CASE("density: log-quadratic estimator does not inflate the variance")
{
  const auto v = normal_draws(4000, 0.0, 1.0, 6);
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  double ss = 0.0;
  for (double x : v) {
    ss += (x - m) * (x - m);
  }
  const double s2 = ss / double(v.size());
  auto variance = [](const SmoothedDensity& d) {
    const auto& g = d.grid();
    const auto& f = d.density();
    const double mu = smoothed_mean(d);
    double total = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
      total += 0.5 * (g[i] - g[i - 1]) *
               ((g[i] - mu) * (g[i] - mu) * f[i] + (g[i - 1] - mu) * (g[i - 1] - mu) * f[i - 1]);
    }
    return total;
  };
  DensityOptions kde;
  kde.estimator = DensityEstimator::gaussian_kde;
  const auto k = estimate_density(v, kde);
  const auto q = estimate_density(v);
  const double h = k.bandwidth();
  // Kernel smoothing adds h^2 to the variance.
  CHECK(std::abs(variance(k) - (s2 + h * h)) < 1e-3);
  CHECK(std::abs(variance(q) - s2) < 0.25 * h * h);
}

TEST_CASE("density: smoothed and raw quantiles agree for large B")
{
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto v = normal_draws(4000, 1.0, 2.0, 10 + s);
    for (auto& x : v) {
      x = x + 0.1 * x * x;
    }
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    double ss = 0.0;
    for (double x : v) {
      ss += (x - mean) * (x - mean);
    }
    const double sd = std::sqrt(ss / double(v.size() - 1));
    const auto d = estimate_density(v);
    for (double q : {0.05, 0.25, 0.5, 0.75, 0.95}) {
      CHECK(std::abs(smoothed_quantile(d, q) - empirical_quantile(v, q)) < 2.0 * sd / std::sqrt(double(v.size())));
    }
  }
}

TEST_CASE("density: intervals nest as the level grows")
{
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto v = normal_draws(300, 0.0, 1.0 + double(s), 20 + s);
    const auto sm = smooth(v);
    const auto a = interval(sm, 0.90);
    const auto b = interval(sm, 0.95);
    CHECK(b.lower <= a.lower);
    CHECK(b.upper >= a.upper);
  }
}

TEST_CASE("density: bad quantile levels")
{
  const auto d = estimate_density(normal_draws(100, 0, 1, 7));
  CHECK_THROWS_AS(smoothed_quantile(d, 0.0), QOutOfRange);
  CHECK_THROWS_AS(smoothed_quantile(d, 1.0), QOutOfRange);
  CHECK_THROWS_AS(interval(Smoothed(d), 1.5), QOutOfRange);
}

TEST_CASE("density: a bounded support keeps every quantile on its side")
{
  // Shifted chi-square(1) mirrored below 4.6: J-shaped against the bound.
  Philox4x32 g(3, 0);
  std::chi_squared_distribution<double> chi(1.0);
  std::vector<double> v(2000);
  for (auto& x : v) {
    x = 4.6 - chi(g);
  }
  DensityOptions opts;
  opts.upper_bound = 4.6;
  const auto d = estimate_density(v, opts);
  CHECK(d.bounded());
  CHECK(d.bounded_above());
  CHECK(trapezoid(d) == doctest::Approx(1.0).epsilon(1e-9));
  double prev = -INFINITY;
  for (int i = 1; i < 200; ++i) {
    const double q = smoothed_quantile(d, i / 200.0);
    CHECK(q <= 4.6);
    CHECK(q >= prev);
    prev = q;
  }
  CHECK(d.pdf(4.7) == 0.0);
  CHECK(d.cdf(4.6) == doctest::Approx(1.0));
  // Exact chi-square(1) quantiles, 4.6 - {5.0239, 0.00098}.
  CHECK(4.6 - smoothed_quantile(d, 0.025) == doctest::Approx(5.0239).epsilon(0.05));
  CHECK(smoothed_quantile(d, 0.975) > 4.6 - 0.05);

  // Unbounded smoothing spills past the bound.
  CHECK(smoothed_quantile(estimate_density(v), 0.999) > 4.6);

  opts.lower_bound = 0.0;
  CHECK_THROWS_AS(estimate_density(v, opts), ConfigError);
}

TEST_CASE("density: lower bound mirrors the upper one")
{
  Philox4x32 g(4, 0);
  std::chi_squared_distribution<double> chi(1.0);
  std::vector<double> up(1500);
  std::vector<double> down(1500);
  for (std::size_t i = 0; i < up.size(); ++i) {
    const double c = chi(g);
    up[i] = 1.0 - c;
    down[i] = -1.0 + c;
  }
  DensityOptions ou;
  ou.upper_bound = 1.0;
  DensityOptions od;
  od.lower_bound = -1.0;
  const auto du = estimate_density(up, ou);
  const auto dd = estimate_density(down, od);
  for (double q : {0.05, 0.5, 0.9}) {
    CHECK(smoothed_quantile(du, q) == doctest::Approx(-smoothed_quantile(dd, 1.0 - q)).epsilon(1e-9));
  }
  CHECK(smoothed_mean(du) == doctest::Approx(-smoothed_mean(dd)).epsilon(1e-9));
}

TEST_CASE("density: plug-in bandwidth on normal data")
{
  // For N(0, 1) the kernel AMISE-optimal width is 1.06 n^(-1/5).
  const auto v = normal_draws(5000, 0.0, 1.0, 8);
  const double h0 = plugin_bandwidth(v, 0);
  CHECK(h0 == doctest::Approx(1.06 * std::pow(5000.0, -0.2)).epsilon(0.2));
  // Scale equivariance.
  std::vector<double> w(v);
  for (auto& x : w) {
    x = 3.0 * x + 10.0;
  }
  CHECK(plugin_bandwidth(w, 2) == doctest::Approx(3.0 * plugin_bandwidth(v, 2)).epsilon(1e-6));
  // The local quadratic fit tolerates a wider window.
  CHECK(plugin_bandwidth(v, 2) > h0);
}
