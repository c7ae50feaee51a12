#pragma once

#include "evint/bootstrap.hpp"
#include "evint/classification.hpp"
#include "evint/density.hpp"
#include "evint/model_family.hpp"

#include <optional>
#include <string>
#include <vector>

namespace evint {

struct AnalysisConfig
{
  LinearModelSpace reference;
  LinearModelSpace alternative;
  std::size_t replicates = 4000;
  std::uint64_t seed = 0;
  std::vector<double> levels{0.95, 0.90};
  bool global = true;
  bool local = true;
  std::string penalty = "sic";
  Thresholds thresholds;
  unsigned threads = 0;
  double max_reject_fraction = 0.05;
  RankPolicy rank_policy = RankPolicy::reject;
  DensityOptions density;

  /// @throws ConfigError (B < 100, bad levels, no mode selected, ...)
  void validate() const;
};

struct LevelReport
{
  IntervalEstimate interval;
  SecurityCategory security = SecurityCategory::WI;
  bool point_outside = false;
};

struct KindReport
{
  EvidenceMode mode = EvidenceMode::global;
  double point = 0.0; ///< smoothed bootstrap mean
  EvidenceCategory category = EvidenceCategory::weak;
  std::vector<LevelReport> levels;
  std::size_t rejected = 0;
  bool point_mass = false;
  double bandwidth = 0.0;
};

struct EvidenceReport
{
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::string penalty;
  std::string reference_label;
  std::string alternative_label;
  double observed = 0.0; ///< Delta-SIC on the observed data
  std::optional<KindReport> global;
  std::optional<KindReport> local;
  std::vector<std::string> warnings;
};

/// Bootstraps the evidence for `reference` over `alternative`, smooths each
/// kind's distribution, and labels point and intervals.
EvidenceReport analyze(const Dataset& data, const AnalysisConfig& config);

} // namespace evint
