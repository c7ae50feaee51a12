#pragma once

#include "evint/dataset.hpp"
#include "evint/evidence.hpp"
#include "evint/model_family.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace evint {

struct BootstrapConfig
{
  std::size_t replicates = 4000; ///< B
  std::uint64_t seed = 0;
  EvidenceMode mode = EvidenceMode::global;
  /// Largest tolerated rejected / (B + rejected) before the run fails.
  double max_reject_fraction = 0.05;
  /// Worker cap; 0 uses every hardware thread. Never changes results.
  unsigned threads = 0;
  RankPolicy rank_policy = RankPolicy::reject;

  /// @throws ConfigError
  void validate() const;
};

/// B bootstrap replicates of one evidence function. Only the evidence
/// difference is ever stored; there is no per-model output.
struct EvidenceSample
{
  std::vector<double> values;
  EvidenceMode mode = EvidenceMode::global;
  std::string penalty;
  std::size_t n = 0;
  std::size_t rejected_count = 0;
  std::uint64_t seed = 0;
  /// Hard limits every replicate obeys. Global evidence between nested
  /// spaces can never pass c_n (p_A - p_R), because refitting the larger
  /// space on the same resample never lowers its likelihood.
  double lower_bound = -std::numeric_limits<double>::infinity();
  double upper_bound = std::numeric_limits<double>::infinity();
};

/// Support limits of global evidence for reference vs alternative spaces
/// ({-inf, +inf} unless one space contains the other).
std::pair<double, double> global_evidence_bounds(const LinearModelSpace& reference,
                                                 const LinearModelSpace& alternative,
                                                 double c_n);

/// Row indices of one with-replacement resample of size n. Fully determined
/// by (seed, replicate, attempt); `attempt` > 0 gives the redraws used after a
/// rejected replicate.
std::vector<std::size_t> resample_indices(std::size_t n,
                                          std::size_t replicate,
                                          std::uint64_t seed,
                                          std::size_t attempt = 0);

Dataset resample_rows(const Dataset& data,
                      std::size_t replicate,
                      std::uint64_t seed,
                      std::size_t attempt = 0);

/// Evidence uncertainty for two fully specified models: each replicate
/// evaluates both fixed models on the resample.
EvidenceSample bootstrap_evidence(const SpecifiedModel& reference,
                                  const SpecifiedModel& alternative,
                                  const Dataset& data,
                                  const BootstrapConfig& config);

/// Evidence uncertainty for two model spaces.
///
///  - global: refit both spaces on each resample and evaluate on it;
///  - local: refit on each resample, evaluate on the original data;
///  - specified: fit once on the original data, then treat both fits as
///    fixed models (no penalty).
///
/// Replicates whose fits fail (rank deficiency, zero variance) are redrawn
/// and counted in `rejected_count`.
///
/// @throws TooManyRejections if the rejected share exceeds
///   `config.max_reject_fraction`.
EvidenceSample bootstrap_evidence(const LinearModelSpace& reference,
                                  const LinearModelSpace& alternative,
                                  const Dataset& data,
                                  const BootstrapConfig& config,
                                  const Penalty& penalty);

struct GlobalLocalSamples
{
  EvidenceSample global;
  EvidenceSample local;
};

/// Both model-space algorithms from one set of resamples. Each sample is
/// identical to what bootstrap_evidence returns for that mode with the same
/// seed; sharing the resample just halves the fitting work.
GlobalLocalSamples bootstrap_global_local(const LinearModelSpace& reference,
                                          const LinearModelSpace& alternative,
                                          const Dataset& data,
                                          const BootstrapConfig& config,
                                          const Penalty& penalty);

} // namespace evint
