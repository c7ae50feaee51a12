#pragma once

#include <array>
#include <string_view>

namespace evint {

/// Symmetric evidence thresholds: |v| above `strong` is strong, above
/// `prognostic` is prognostic, otherwise weak.
struct Thresholds
{
  double prognostic = 4.0; ///< k_p
  double strong = 7.0;     ///< k_s

  /// @throws ConfigError unless 0 < prognostic < strong.
  void validate() const;
};

enum class EvidenceCategory
{
  strong_reference,
  prognostic_reference,
  weak,
  prognostic_alternative,
  strong_alternative,
};

/// Observed-data labels (SV..WI) and the simulation-only counterfactual
/// labels (MS, CS, MI, CI, W). In simulation tables SV folds into SS.
enum class SecurityCategory
{
  SV,
  SS,
  SI,
  PS,
  PI,
  WI,
  MS,
  CS,
  MI,
  CI,
  W,
};

/// The nine simulation categories, in table column order.
inline constexpr std::array<SecurityCategory, 9> kSimulationCategories = {
  SecurityCategory::MS, SecurityCategory::CS, SecurityCategory::MI,
  SecurityCategory::CI, SecurityCategory::W,  SecurityCategory::PI,
  SecurityCategory::SI, SecurityCategory::PS, SecurityCategory::SS,
};

std::string_view to_code(SecurityCategory c) noexcept;
std::string_view to_string(EvidenceCategory c) noexcept;

/// Ties at a threshold go to the weaker category.
EvidenceCategory evidence_category(double value, const Thresholds& t = {});

/// Strength of the point estimate combined with how far the proximal bound
/// (the end of the interval nearest 0) sits from 0. An interval reaching 0
/// is always insecure. A point outside its interval is clamped into it
/// first; see point_outside_interval.
///
/// @throws InvalidInterval if lower > upper.
SecurityCategory security_category(double point, double lower, double upper, const Thresholds& t = {});

/// Simulation labelling when the sign of the better model is known
/// (`true_sign` is +1 when the reference model is closer to the generator).
SecurityCategory simulation_category(double point,
                                     double lower,
                                     double upper,
                                     int true_sign,
                                     const Thresholds& t = {});

/// True when labelling had to clamp the point into [lower, upper].
bool point_outside_interval(double point, double lower, double upper) noexcept;

} // namespace evint
