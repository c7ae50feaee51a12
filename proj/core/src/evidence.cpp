#include "evint/evidence.hpp"

#include "evint/errors.hpp"

#include <cmath>

namespace evint {

Penalty
Penalty::sic()
{
  return {"sic", [](double n) { return std::log(n); }};
}

Penalty
Penalty::aic()
{
  return {"aic", [](double) { return 2.0; }};
}

Penalty
Penalty::constant(double value, std::string name)
{
  return {std::move(name), [value](double) { return value; }};
}

Penalty
Penalty::by_name(std::string_view name)
{
  if (name == "sic" || name == "bic") {
    return sic();
  }
  if (name == "aic") {
    return aic();
  }
  throw ConfigError("unknown penalty '" + std::string(name) + "' (expected sic or aic)");
}

bool
consistency_gate(const Penalty& penalty, std::uint64_t n_max)
{
  for (std::uint64_t n = 3; n <= n_max; ++n) {
    const double nn = static_cast<double>(n);
    const double c = penalty.c_n(nn);
    if (!(c > std::log(std::log(nn)) && c < nn)) {
      return false;
    }
  }
  return true;
}

std::string_view
to_string(EvidenceMode mode) noexcept
{
  switch (mode) {
  case EvidenceMode::specified:
    return "specified";
  case EvidenceMode::global:
    return "global";
  case EvidenceMode::local:
    return "local";
  }
  return "unknown";
}

EvidenceMode
evidence_mode_from_string(std::string_view s)
{
  if (s == "specified") {
    return EvidenceMode::specified;
  }
  if (s == "global") {
    return EvidenceMode::global;
  }
  if (s == "local") {
    return EvidenceMode::local;
  }
  throw ConfigError("unknown evidence mode '" + std::string(s) + "'");
}

EvidenceValue
raw_evidence_specified(const SpecifiedModel& reference,
                       const SpecifiedModel& alternative,
                       const Dataset& data)
{
  const double lr = log_likelihood(reference, data);
  const double la = log_likelihood(alternative, data);
  const double v = penalized_difference(lr, la, 0.0, 0, 0);
  if (!std::isfinite(v)) {
    throw NonFiniteLikelihood("evidence between specified models is not finite");
  }
  return {v, EvidenceMode::specified, data.size(), 0.0};
}

EvidenceValue
raw_evidence_global(const LinearModelSpace& reference,
                    const LinearModelSpace& alternative,
                    const Dataset& boot_data,
                    const Penalty& penalty,
                    RankPolicy policy)
{
  const auto fr = fit_mle(reference, boot_data, policy);
  const auto fa = fit_mle(alternative, boot_data, policy);
  const int pr = param_count(reference);
  const int pa = param_count(alternative);
  const double c = penalty(boot_data.size());
  const double v =
    penalized_difference(log_likelihood(fr, boot_data), log_likelihood(fa, boot_data), c, pr, pa);
  return {v, EvidenceMode::global, boot_data.size(), c * (pa - pr)};
}

EvidenceValue
raw_evidence_local(const LinearModelSpace& reference,
                   const LinearModelSpace& alternative,
                   const Dataset& boot_data,
                   const Dataset& orig_data,
                   const Penalty& penalty,
                   RankPolicy policy)
{
  if (boot_data.dimension() != orig_data.dimension()) {
    throw DimensionMismatch("bootstrap and original data differ in covariate dimension");
  }
  const auto fr = fit_mle(reference, boot_data, policy);
  const auto fa = fit_mle(alternative, boot_data, policy);
  const int pr = param_count(reference);
  const int pa = param_count(alternative);
  const double c = penalty(orig_data.size());
  const double v =
    penalized_difference(log_likelihood(fr, orig_data), log_likelihood(fa, orig_data), c, pr, pa);
  return {v, EvidenceMode::local, orig_data.size(), c * (pa - pr)};
}

double
sic(const LinearModelSpace& space, const Dataset& data, const Penalty& penalty, RankPolicy policy)
{
  const auto fit = fit_mle(space, data, policy);
  return -2.0 * log_likelihood(fit, data) + penalty(data.size()) * param_count(space);
}

} // namespace evint
