#pragma once

#include "evint/density.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace evint {

/// Two-visit mark-recapture counts.
struct LPData
{
  std::int64_t m = 0;  ///< animals marked on the first visit
  std::int64_t n2 = 0; ///< animals caught on the second visit
  std::int64_t x = 0;  ///< marked animals among the second catch

  /// @throws ConfigError on negative counts or x > min(m, n2).
  void validate() const;
};

/// floor(n2 * m / x).
/// @throws ZeroRecaptures if x == 0.
std::int64_t lp_estimate(const LPData& d);

/// n2 / lp_estimate(d).
double lp_capture_prob(const LPData& d);

/// Which counts a hypothetical repeat of the study holds fixed.
enum class LPScheme
{
  both_fixed, ///< m and n2 fixed; X hypergeometric
  m_fixed,    ///< N ~ Bin(T, phi); X ~ Bin(min(m, N), m / T)
  none_fixed, ///< M, N ~ Bin(T, phi); X ~ Bin(min(M, N), M / T)
};

std::string_view to_string(LPScheme s) noexcept;
LPScheme lp_scheme_from_string(std::string_view s);

struct LPBootstrapSample
{
  LPScheme scheme = LPScheme::both_fixed;
  std::vector<double> estimates; ///< finite, unfloored
  std::size_t discarded = 0;     ///< draws with X = 0
  std::size_t draws = 0;
  std::uint64_t seed = 0;
};

/// B parametric-bootstrap estimates under `scheme` with true size T and
/// capture probability phi. Draws with no recaptures are dropped and
/// counted.
///
/// @throws ConfigError unless T >= max(m, n2), 0 < phi < 1 and B >= 1.
LPBootstrapSample lp_bootstrap(std::int64_t T,
                               double phi,
                               std::int64_t m,
                               std::int64_t n2,
                               LPScheme scheme,
                               std::size_t replicates,
                               std::uint64_t seed);

/// Smoothed equal-tailed interval of the estimates.
/// @throws InsufficientSample with fewer than 100 estimates.
IntervalEstimate lp_interval(const LPBootstrapSample& sample,
                             double level,
                             const DensityOptions& options = {});

} // namespace evint
