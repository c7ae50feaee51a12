#pragma once

#include "evint/dataset.hpp"
#include "evint/model_family.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace evint {

/// Complexity penalty c_n applied per estimated parameter.
struct Penalty
{
  std::string name;
  std::function<double(double n)> c_n;

  double operator()(std::size_t n) const { return c_n(static_cast<double>(n)); }

  /// c_n = log(n).
  static Penalty sic();
  /// c_n = 2. Constructible, but fails the consistency gate.
  static Penalty aic();
  /// Any penalty with a fixed per-parameter cost.
  static Penalty constant(double value, std::string name);

  /// "sic" or "aic"; throws ConfigError otherwise.
  static Penalty by_name(std::string_view name);
};

/// True when log(log(n)) < c_n(n) < n for every integer n in [3, n_max], the
/// growth window that keeps the resulting evidence function consistent.
bool consistency_gate(const Penalty& penalty, std::uint64_t n_max = 1'000'000);

enum class EvidenceMode
{
  specified,
  global,
  local,
};

std::string_view to_string(EvidenceMode mode) noexcept;
EvidenceMode evidence_mode_from_string(std::string_view s);

/// An evidence value on the Delta-SIC scale. Positive values support the
/// reference model.
struct EvidenceValue
{
  double value = 0.0;
  EvidenceMode mode = EvidenceMode::specified;
  std::size_t n = 0;
  double penalty_term = 0.0; ///< c_n(n) * (p_A - p_R)
};

/// -2 (l_A(data) - l_R(data)) for two fully specified models; no penalty.
EvidenceValue raw_evidence_specified(const SpecifiedModel& reference,
                                     const SpecifiedModel& alternative,
                                     const Dataset& data);

/// Both spaces fit and evaluated on `boot_data`; equals
/// sic(alternative) - sic(reference).
EvidenceValue raw_evidence_global(const LinearModelSpace& reference,
                                  const LinearModelSpace& alternative,
                                  const Dataset& boot_data,
                                  const Penalty& penalty,
                                  RankPolicy policy = RankPolicy::reject);

/// Both spaces fit on `boot_data` but evaluated on `orig_data`. The penalty
/// uses the size of `orig_data`.
EvidenceValue raw_evidence_local(const LinearModelSpace& reference,
                                 const LinearModelSpace& alternative,
                                 const Dataset& boot_data,
                                 const Dataset& orig_data,
                                 const Penalty& penalty,
                                 RankPolicy policy = RankPolicy::reject);

/// -2 * maximized log-likelihood + c_n(n) * p.
double sic(const LinearModelSpace& space,
           const Dataset& data,
           const Penalty& penalty,
           RankPolicy policy = RankPolicy::reject);

/// The shared arithmetic of every evidence value. Written so that swapping
/// the roles of the two models negates the result exactly.
inline double
penalized_difference(double loglik_reference,
                     double loglik_alternative,
                     double c_n,
                     int p_reference,
                     int p_alternative) noexcept
{
  return -2.0 * (loglik_alternative - loglik_reference) +
         c_n * static_cast<double>(p_alternative - p_reference);
}

} // namespace evint
