#include "evint/analysis.hpp"

#include "evint/errors.hpp"
#include "evint/evidence.hpp"

#include <cmath>
#include <sstream>

namespace evint {

void
AnalysisConfig::validate() const
{
  if (replicates < 100) {
    throw ConfigError("analysis needs at least 100 bootstrap replicates");
  }
  if (levels.empty()) {
    throw ConfigError("at least one interval level is required");
  }
  for (double l : levels) {
    if (!(l > 0.0 && l < 1.0)) {
      throw ConfigError("interval levels must lie in (0, 1)");
    }
  }
  if (!global && !local) {
    throw ConfigError("select at least one of global and local");
  }
  thresholds.validate();
  Penalty::by_name(penalty);
}

namespace {

KindReport
summarize(const EvidenceSample& sample, const AnalysisConfig& cfg, std::vector<std::string>& warnings)
{
  KindReport k;
  k.mode = sample.mode;
  k.rejected = sample.rejected_count;
  const Smoothed sm = smooth(sample, cfg.density);
  k.point_mass = std::holds_alternative<PointMass>(sm);
  if (const auto* d = std::get_if<SmoothedDensity>(&sm)) {
    k.bandwidth = d->bandwidth();
  }
  k.point = smoothed_mean(sm);
  k.category = evidence_category(k.point, cfg.thresholds);
  const std::string name(to_string(sample.mode));
  if (k.point_mass) {
    std::ostringstream w;
    w.precision(17);
    w << name << " bootstrap distribution is a point mass at " << k.point;
    warnings.push_back(w.str());
  }
  for (double level : cfg.levels) {
    LevelReport lr;
    lr.interval = interval(sm, level);
    lr.security = security_category(k.point, lr.interval.lower, lr.interval.upper, cfg.thresholds);
    lr.point_outside = point_outside_interval(k.point, lr.interval.lower, lr.interval.upper);
    if (lr.point_outside) {
      std::ostringstream w;
      w << name << " point estimate lies outside its " << level
        << " interval; clamped for labelling";
      warnings.push_back(w.str());
    }
    k.levels.push_back(lr);
  }
  return k;
}

} // namespace

EvidenceReport
analyze(const Dataset& data, const AnalysisConfig& config)
{
  config.validate();
  const Penalty penalty = Penalty::by_name(config.penalty);

  EvidenceReport r;
  r.n = data.size();
  r.replicates = config.replicates;
  r.seed = config.seed;
  r.penalty = penalty.name;
  r.reference_label = config.reference.label();
  r.alternative_label = config.alternative.label();
  if (!consistency_gate(penalty)) {
    r.warnings.push_back("penalty " + penalty.name + " is not consistent; evidence error rates will not vanish");
  }
  if (config.reference == config.alternative) {
    r.warnings.push_back("reference and alternative model spaces are identical");
  }
  r.observed = raw_evidence_global(config.reference, config.alternative, data, penalty, config.rank_policy).value;

  BootstrapConfig bc;
  bc.replicates = config.replicates;
  bc.seed = config.seed;
  bc.max_reject_fraction = config.max_reject_fraction;
  bc.threads = config.threads;
  bc.rank_policy = config.rank_policy;
  const auto samples = bootstrap_global_local(config.reference, config.alternative, data, bc, penalty);

  if (config.global) {
    r.global = summarize(samples.global, config, r.warnings);
  }
  if (config.local) {
    r.local = summarize(samples.local, config, r.warnings);
  }
  return r;
}

} // namespace evint
