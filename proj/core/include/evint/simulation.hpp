#pragma once

#include "evint/classification.hpp"
#include "evint/density.hpp"
#include "evint/model_family.hpp"
#include "evint/targets.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace evint {

/// One row of the regression topology table: three-covariate generator, the
/// two compared spaces, and the name of the asymptotic law of the
/// unpenalized statistic (kept only as a label).
struct TopologyCase
{
  int id = 0;
  std::array<double, 3> slopes{};
  std::string reference_mask;
  std::string alternative_mask;
  std::string asymptotic_label;
  bool correctly_specified = true;

  LinearModelSpace reference() const { return LinearModelSpace::from_mask(reference_mask); }
  LinearModelSpace alternative() const { return LinearModelSpace::from_mask(alternative_mask); }
};

/// Cases 1..14 in table order.
std::span<const TopologyCase> topology_cases();

/// @throws ConfigError unless 1 <= id <= 14.
const TopologyCase& topology_case(int id);

/// Case 0: both spaces identical, so every interval is the point 0.
TopologyCase identical_spaces_case();

struct SimulationSettings
{
  std::size_t n = 100;
  std::size_t trials = 1000;
  std::size_t replicates = 1000; ///< bootstrap B per trial
  std::uint64_t seed = 0;
  std::vector<double> levels{0.95, 0.90};
  std::string penalty = "sic";
  double intercept = 2.0;
  double sigma = 1.0;
  double max_reject_fraction = 0.05;
  unsigned threads = 0;
  DensityOptions density;

  /// @throws ConfigError
  void validate() const;
};

/// The fixed design of a run: n x 3 standard normal covariates drawn from
/// the master seed (independent of the case, so cases share a design).
RowMatrix simulation_design(std::size_t n, std::uint64_t seed);

GaussianLinearGenerator case_generator(const TopologyCase& c, const SimulationSettings& s);

struct TrialRecord
{
  std::size_t trial = 0;
  double local_target = 0.0;
  std::vector<IntervalEstimate> global; ///< one per level
  std::vector<IntervalEstimate> local;
  std::size_t rejected = 0;
};

struct CoverageCell
{
  double level = 0.0;
  TargetKind kind = TargetKind::global;
  std::size_t covered = 0;
  double coverage = 0.0;
  double standard_error = 0.0; ///< sqrt(p (1 - p) / trials)
  double mean_length = 0.0;
  double sd_length = 0.0;
};

struct CoverageResult
{
  int case_id = 0;
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  double global_target = 0.0;
  std::vector<CoverageCell> cells; ///< level-major, global before local
  std::vector<TrialRecord> records;

  const CoverageCell& cell(double level, TargetKind kind) const;
};

/// Coverage experiment for one topology. Every trial draws a fresh response
/// on the fixed design, bootstraps both evidence kinds, and checks the global
/// intervals against the global target and the local intervals against that
/// trial's local target. Trials run in parallel; each is reproducible from
/// (case id, trial index, seed).
CoverageResult run_coverage(const TopologyCase& c, const SimulationSettings& s);

struct RatioRow
{
  std::size_t n = 0;
  std::vector<double> ratios; ///< local / global length per trial
  std::size_t undefined = 0;  ///< trials with a zero-length global interval
  double median = 0.0;
  double lower_quartile = 0.0;
  double upper_quartile = 0.0;
};

/// Local to global length ratios at `level` across sample sizes. The design
/// is redrawn for each n. Sizes where every ratio is 0/0 produce no row.
std::vector<RatioRow> length_ratio_sweep(const TopologyCase& c,
                                         std::span<const std::size_t> n_values,
                                         const SimulationSettings& s,
                                         double level = 0.95);

struct SecurityRow
{
  TargetKind kind = TargetKind::global;
  std::array<std::size_t, 9> counts{}; ///< in kSimulationCategories order
  std::array<double, 9> proportions{};
  double reliability = 0.0;
};

struct SecurityResult
{
  int true_sign = 1;
  double divergence = 0.0; ///< 2n (K_A - K_R)
  double level = 0.90;
  std::size_t trials = 0;
  std::vector<SecurityRow> rows; ///< global then local
  /// Per-trial labels, [trial][kind].
  std::vector<std::array<SecurityCategory, 2>> labels;
  std::vector<std::array<double, 2>> points;
};

/// Security and reliability tabulation. Points are smoothed bootstrap means,
/// intervals equal-tailed at `level`.
///
/// @throws EquidistantModels if both spaces are equally far from the
///   generator, leaving no correct sign.
SecurityResult run_security_tabulation(const GaussianLinearGenerator& g,
                                       const LinearModelSpace& reference,
                                       const LinearModelSpace& alternative,
                                       const SimulationSettings& s,
                                       const Thresholds& thresholds = {},
                                       double level = 0.90);

/// Regression stand-ins for the four model-set scenarios of the security
/// table: A and B correctly specified (strong and weaker signal), C mildly
/// and D badly misspecified.
struct SecurityPreset
{
  char id = 'A';
  std::string adequacy;
  std::array<double, 3> slopes{};
  std::string reference_mask;
  std::string alternative_mask;
};

std::span<const SecurityPreset> security_presets();

/// @throws ConfigError for an unknown id.
const SecurityPreset& security_preset(char id);

} // namespace evint
