#include "evint/lincoln_petersen.hpp"

#include "evint/errors.hpp"
#include "evint/rng.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace evint {

void
LPData::validate() const
{
  if (m < 0 || n2 < 0 || x < 0) {
    throw ConfigError("mark-recapture counts must be nonnegative");
  }
  if (x > std::min(m, n2)) {
    throw ConfigError("recaptures cannot exceed either catch");
  }
}

std::int64_t
lp_estimate(const LPData& d)
{
  d.validate();
  if (d.x == 0) {
    throw ZeroRecaptures("no marked animals recaptured; the estimate is infinite");
  }
  return (d.n2 * d.m) / d.x;
}

double
lp_capture_prob(const LPData& d)
{
  const auto t = lp_estimate(d);
  if (t == 0) {
    throw ZeroRecaptures("population estimate is zero");
  }
  return static_cast<double>(d.n2) / static_cast<double>(t);
}

std::string_view
to_string(LPScheme s) noexcept
{
  switch (s) {
    case LPScheme::both_fixed:
      return "both_fixed";
    case LPScheme::m_fixed:
      return "m_fixed";
    case LPScheme::none_fixed:
      return "none_fixed";
  }
  return "both_fixed";
}

LPScheme
lp_scheme_from_string(std::string_view s)
{
  for (auto v : {LPScheme::both_fixed, LPScheme::m_fixed, LPScheme::none_fixed}) {
    if (s == to_string(v)) {
      return v;
    }
  }
  throw ConfigError("unknown scheme '" + std::string(s) + "'");
}

namespace {

/// Marked animals in k draws without replacement from `total`, `marked` of
/// them marked. Sequential urn, exact.
std::int64_t
hypergeometric(std::int64_t marked, std::int64_t total, std::int64_t k, Philox4x32& rng)
{
  std::int64_t hits = 0;
  std::int64_t left_marked = marked;
  std::int64_t left = total;
  for (std::int64_t i = 0; i < k; ++i) {
    if (rng.uniform() * static_cast<double>(left) < static_cast<double>(left_marked)) {
      ++hits;
      --left_marked;
    }
    --left;
  }
  return hits;
}

std::int64_t
binomial(std::int64_t size, double p, Philox4x32& rng)
{
  if (size <= 0 || p <= 0.0) {
    return 0;
  }
  if (p >= 1.0) {
    return size;
  }
  std::binomial_distribution<std::int64_t> d(size, p);
  return d(rng);
}

} // namespace

LPBootstrapSample
lp_bootstrap(std::int64_t T,
             double phi,
             std::int64_t m,
             std::int64_t n2,
             LPScheme scheme,
             std::size_t replicates,
             std::uint64_t seed)
{
  if (m < 0 || n2 < 0 || T < std::max(m, n2)) {
    throw ConfigError("population size must be at least both catches");
  }
  if (!(phi > 0.0 && phi < 1.0)) {
    throw ConfigError("capture probability must lie in (0, 1)");
  }
  if (replicates < 1) {
    throw ConfigError("replicate count must be at least 1");
  }

  LPBootstrapSample s;
  s.scheme = scheme;
  s.draws = replicates;
  s.seed = seed;
  s.estimates.reserve(replicates);
  const std::uint64_t stream_seed = derive_seed(seed, static_cast<std::uint64_t>(scheme));
  const double td = static_cast<double>(T);

  for (std::size_t b = 0; b < replicates; ++b) {
    Philox4x32 rng(stream_seed, b);
    double numerator = 0.0;
    std::int64_t x = 0;
    switch (scheme) {
      case LPScheme::both_fixed:
        x = hypergeometric(m, T, n2, rng);
        numerator = static_cast<double>(m) * static_cast<double>(n2);
        break;
      case LPScheme::m_fixed: {
        const auto n = binomial(T, phi, rng);
        x = binomial(std::min(m, n), static_cast<double>(m) / td, rng);
        numerator = static_cast<double>(m) * static_cast<double>(n);
        break;
      }
      case LPScheme::none_fixed: {
        const auto mm = binomial(T, phi, rng);
        const auto n = binomial(T, phi, rng);
        x = binomial(std::min(mm, n), static_cast<double>(mm) / td, rng);
        numerator = static_cast<double>(mm) * static_cast<double>(n);
        break;
      }
    }
    if (x == 0) {
      ++s.discarded;
      continue;
    }
    s.estimates.push_back(numerator / static_cast<double>(x));
  }
  return s;
}

IntervalEstimate
lp_interval(const LPBootstrapSample& sample, double level, const DensityOptions& options)
{
  if (sample.estimates.size() < 100) {
    throw InsufficientSample("need at least 100 finite estimates, have " +
                             std::to_string(sample.estimates.size()));
  }
  return interval(smooth(sample.estimates, options), level);
}

} // namespace evint
