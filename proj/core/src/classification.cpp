#include "evint/classification.hpp"

#include "evint/errors.hpp"

#include <algorithm>
#include <cmath>

namespace evint {

void
Thresholds::validate() const
{
  if (!(prognostic > 0.0 && prognostic < strong)) {
    throw ConfigError("thresholds must satisfy 0 < prognostic < strong");
  }
}

std::string_view
to_code(SecurityCategory c) noexcept
{
  switch (c) {
  case SecurityCategory::SV: return "SV";
  case SecurityCategory::SS: return "SS";
  case SecurityCategory::SI: return "SI";
  case SecurityCategory::PS: return "PS";
  case SecurityCategory::PI: return "PI";
  case SecurityCategory::WI: return "WI";
  case SecurityCategory::MS: return "MS";
  case SecurityCategory::CS: return "CS";
  case SecurityCategory::MI: return "MI";
  case SecurityCategory::CI: return "CI";
  case SecurityCategory::W: return "W";
  }
  return "?";
}

std::string_view
to_string(EvidenceCategory c) noexcept
{
  switch (c) {
  case EvidenceCategory::strong_reference: return "strong_reference";
  case EvidenceCategory::prognostic_reference: return "prognostic_reference";
  case EvidenceCategory::weak: return "weak";
  case EvidenceCategory::prognostic_alternative: return "prognostic_alternative";
  case EvidenceCategory::strong_alternative: return "strong_alternative";
  }
  return "?";
}

EvidenceCategory
evidence_category(double v, const Thresholds& t)
{
  if (v > t.strong) {
    return EvidenceCategory::strong_reference;
  }
  if (v > t.prognostic) {
    return EvidenceCategory::prognostic_reference;
  }
  if (v >= -t.prognostic) {
    return EvidenceCategory::weak;
  }
  if (v >= -t.strong) {
    return EvidenceCategory::prognostic_alternative;
  }
  return EvidenceCategory::strong_alternative;
}

bool
point_outside_interval(double point, double lower, double upper) noexcept
{
  return point < lower || point > upper;
}

namespace {

enum class Strength
{
  weak,
  prognostic,
  strong,
};

enum class Security
{
  insecure,
  secure,
  very_secure,
};

struct Oriented
{
  Strength strength;
  Security security;
  int sign; // +1 reference favored, -1 alternative, 0 neither
};

// Mirror negative evidence onto the positive axis so the proximal bound is
// always the lower one.
Oriented
orient(double point, double lower, double upper, const Thresholds& t)
{
  if (lower > upper) {
    throw InvalidInterval("interval lower bound exceeds upper bound");
  }
  point = std::clamp(point, lower, upper);
  const int sign = point > 0.0 ? 1 : (point < 0.0 ? -1 : 0);
  if (sign < 0) {
    point = -point;
    std::swap(lower, upper);
    lower = -lower;
    upper = -upper;
  }

  Oriented o{Strength::weak, Security::insecure, sign};
  if (point > t.strong) {
    o.strength = Strength::strong;
  } else if (point > t.prognostic) {
    o.strength = Strength::prognostic;
  }

  const bool overlaps_zero = lower <= 0.0;
  if (!overlaps_zero) {
    if (lower > t.strong) {
      o.security = Security::very_secure;
    } else if (lower > t.prognostic) {
      o.security = Security::secure;
    }
  }
  return o;
}

} // namespace

SecurityCategory
security_category(double point, double lower, double upper, const Thresholds& t)
{
  const Oriented o = orient(point, lower, upper, t);
  switch (o.strength) {
  case Strength::strong:
    return o.security == Security::very_secure ? SecurityCategory::SV
           : o.security == Security::secure   ? SecurityCategory::SS
                                              : SecurityCategory::SI;
  case Strength::prognostic:
    // After clamping a prognostic point cannot have a very secure bound.
    return o.security == Security::insecure ? SecurityCategory::PI : SecurityCategory::PS;
  case Strength::weak:
    break;
  }
  return SecurityCategory::WI;
}

SecurityCategory
simulation_category(double point, double lower, double upper, int true_sign, const Thresholds& t)
{
  const Oriented o = orient(point, lower, upper, t);
  if (o.strength == Strength::weak) {
    return SecurityCategory::W;
  }
  const bool secure = o.security != Security::insecure;
  const bool veridical = o.sign == (true_sign >= 0 ? 1 : -1);
  if (o.strength == Strength::strong) {
    if (veridical) {
      return secure ? SecurityCategory::SS : SecurityCategory::SI;
    }
    return secure ? SecurityCategory::MS : SecurityCategory::MI;
  }
  if (veridical) {
    return secure ? SecurityCategory::PS : SecurityCategory::PI;
  }
  return secure ? SecurityCategory::CS : SecurityCategory::CI;
}

} // namespace evint
