#include "evint/errors.hpp"
#include "evint/lincoln_petersen.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace evint;

TEST_CASE("lincoln-petersen: point estimates")
{
  CHECK(lp_estimate({221, 131, 116}) == 249);
  CHECK(std::abs(lp_capture_prob({221, 131, 116}) - 0.5261044) < 5e-7);
  CHECK(lp_estimate({40, 40, 40}) == 40);
  CHECK(lp_capture_prob({40, 40, 40}) == 1.0);
  CHECK(lp_estimate({100, 50, 25}) == 200);
  CHECK(lp_capture_prob({100, 50, 25}) == 0.25);
  CHECK_THROWS_AS(lp_estimate({10, 10, 0}), ZeroRecaptures);
  CHECK_THROWS_AS(lp_estimate({10, 5, 6}), ConfigError);
  CHECK_THROWS_AS(lp_estimate({-1, 5, 0}), ConfigError);
}

TEST_CASE("lincoln-petersen: everything marked is degenerate")
{
  const auto s = lp_bootstrap(150, 0.5, 150, 80, LPScheme::both_fixed, 500, 1);
  CHECK(s.estimates.size() == 500);
  CHECK(s.discarded == 0);
  for (double e : s.estimates) {
    CHECK(e == 150.0);
  }
  const auto iv = lp_interval(s, 0.95);
  CHECK(iv.lower == 150.0);
  CHECK(iv.upper == 150.0);
}

TEST_CASE("lincoln-petersen: draw moments match the sampling laws")
{
  const std::int64_t T = 249, m = 221, n2 = 131;
  const double phi = 131.0 / 249.0;
  const std::size_t B = 100000;

  // Hypergeometric X: recover it from the estimate m n2 / X.
  const auto h = lp_bootstrap(T, phi, m, n2, LPScheme::both_fixed, B, 2);
  double sx = 0.0, sxx = 0.0;
  for (double e : h.estimates) {
    const double x = double(m) * double(n2) / e;
    sx += x;
    sxx += x * x;
  }
  const double nb = double(h.estimates.size());
  const double mean = sx / nb;
  const double var = sxx / nb - mean * mean;
  const double hyp_mean = double(n2) * double(m) / double(T);
  const double hyp_var = hyp_mean * (1.0 - double(m) / double(T)) * double(T - n2) / double(T - 1);
  CHECK(std::abs(mean - hyp_mean) < 3.0 * std::sqrt(hyp_var / nb));
  CHECK(std::abs(var - hyp_var) < 0.03 * hyp_var);
}

TEST_CASE("lincoln-petersen: plug-in consistency of the fixed scheme")
{
  const double phi = 131.0 / 249.0;
  const auto s = lp_bootstrap(249, phi, 221, 131, LPScheme::both_fixed, 10000, 3);
  const double nb = double(s.estimates.size());
  const double mean = std::accumulate(s.estimates.begin(), s.estimates.end(), 0.0) / nb;
  double ss = 0.0;
  for (double e : s.estimates) {
    ss += (e - mean) * (e - mean);
  }
  const double sd = std::sqrt(ss / (nb - 1));
  CHECK(std::abs(mean - 249.0) < 3.0 * sd / std::sqrt(nb));
}

TEST_CASE("lincoln-petersen: discards are rare at the published counts")
{
  const double phi = 131.0 / 249.0;
  for (auto scheme : {LPScheme::both_fixed, LPScheme::m_fixed, LPScheme::none_fixed}) {
    const auto s = lp_bootstrap(249, phi, 221, 131, scheme, 10000, 4);
    CHECK(double(s.discarded) / 10000.0 < 0.001);
    CHECK(s.estimates.size() + s.discarded == 10000);
    for (double e : s.estimates) {
      CHECK(std::isfinite(e));
      CHECK(e > 0.0);
    }
  }
}

TEST_CASE("lincoln-petersen: zero recaptures are discarded and counted")
{
  const auto s = lp_bootstrap(10000, 0.01, 20, 20, LPScheme::both_fixed, 1000, 5);
  CHECK(s.discarded > 900);
  CHECK_THROWS_AS(lp_interval(s, 0.95), InsufficientSample);
}

TEST_CASE("lincoln-petersen: reproducible and validated")
{
  const auto a = lp_bootstrap(249, 0.5, 221, 131, LPScheme::none_fixed, 300, 9);
  const auto b = lp_bootstrap(249, 0.5, 221, 131, LPScheme::none_fixed, 300, 9);
  CHECK(a.estimates == b.estimates);
  CHECK_THROWS_AS(lp_bootstrap(100, 0.5, 221, 131, LPScheme::both_fixed, 10, 1), ConfigError);
  CHECK_THROWS_AS(lp_bootstrap(249, 1.0, 221, 131, LPScheme::both_fixed, 10, 1), ConfigError);
  CHECK_THROWS_AS(lp_bootstrap(249, 0.5, 221, 131, LPScheme::both_fixed, 0, 1), ConfigError);
  CHECK(lp_scheme_from_string("m_fixed") == LPScheme::m_fixed);
  CHECK_THROWS_AS(lp_scheme_from_string("neither"), ConfigError);
}

TEST_CASE("lincoln-petersen: intervals widen with level")
{
  const auto s = lp_bootstrap(249, 131.0 / 249.0, 221, 131, LPScheme::m_fixed, 4000, 6);
  const auto a = lp_interval(s, 0.90);
  const auto b = lp_interval(s, 0.95);
  CHECK(b.lower <= a.lower);
  CHECK(b.upper >= a.upper);
}
