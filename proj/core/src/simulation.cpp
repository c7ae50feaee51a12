#include "evint/simulation.hpp"

#include "evint/bootstrap.hpp"
#include "evint/errors.hpp"
#include "evint/evidence.hpp"
#include "evint/parallel.hpp"
#include "evint/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace evint {

namespace {

constexpr std::uint64_t kDesignTag = 0x6465'7369'676eULL;
constexpr std::uint64_t kTrialTag = 0x7472'6961'6cULL;
constexpr std::uint64_t kSecurityTag = 0x7365'6375'72ULL;

// Labels name the law of the unpenalized statistic for each topology.
const std::array<TopologyCase, 14> kCases = {{
  {1, {0.00, 0.00, 0.15}, "001", "011", "chisquare", true},
  {2, {0.00, 0.30, 0.15}, "001", "011", "non-central chisquare", true},
  {3, {0.00, 0.30, 0.00}, "110", "011", "weighted sum of chisquare", true},
  {4, {0.60, 0.30, 0.00}, "110", "011", "normal", true},
  {5, {0.00, 0.30, 0.15}, "110", "011", "normal", true},
  {6, {0.60, 0.30, 0.00}, "110", "001", "normal", true},
  {7, {0.00, 0.00, 0.15}, "110", "001", "normal", true},
  {8, {0.05, 0.05, 0.15}, "001", "011", "weighted sum of chisquare", false},
  {9, {0.05, 0.30, 0.15}, "001", "011", "normal", false},
  {10, {0.05, 0.30, 0.05}, "110", "011", "weighted sum of chisquare", false},
  {11, {0.60, 0.30, 0.05}, "110", "011", "normal", false},
  {12, {0.05, 0.30, 0.15}, "110", "011", "normal", false},
  {13, {0.60, 0.30, 0.05}, "110", "001", "normal", false},
  {14, {0.05, 0.05, 0.15}, "110", "001", "normal", false},
}};

const std::array<SecurityPreset, 4> kPresets = {{
  {'A', "correctly specified", {0.35, 0.30, 0.00}, "110", "011"},
  {'B', "correctly specified", {0.22, 0.30, 0.00}, "110", "011"},
  {'C', "mildly misspecified", {0.25, 0.30, 0.10}, "110", "011"},
  {'D', "badly misspecified", {0.25, 0.30, 0.35}, "100", "001"},
}};

struct TrialContext
{
  const TopologyCase* topology = nullptr;
  LinearModelSpace reference;
  LinearModelSpace alternative;
  GaussianLinearGenerator generator;
  FittedLinearModel projected_reference;
  FittedLinearModel projected_alternative;
  Penalty penalty;
  std::uint64_t stream_seed = 0;
};

struct TrialSmooth
{
  Smoothed global;
  Smoothed local;
  double local_target = 0.0;
  std::size_t rejected = 0;
};

TrialContext
make_context(const LinearModelSpace& reference,
             const LinearModelSpace& alternative,
             GaussianLinearGenerator g,
             const SimulationSettings& s,
             std::uint64_t stream_seed)
{
  TrialContext ctx;
  ctx.reference = reference;
  ctx.alternative = alternative;
  ctx.projected_reference = project(g, reference);
  ctx.projected_alternative = project(g, alternative);
  ctx.generator = std::move(g);
  ctx.penalty = Penalty::by_name(s.penalty);
  ctx.stream_seed = stream_seed;
  return ctx;
}

TrialSmooth
run_trial(const TrialContext& ctx, std::size_t trial, const SimulationSettings& s, unsigned threads)
{
  const std::uint64_t trial_seed = derive_seed(ctx.stream_seed, trial);
  Philox4x32 rng(trial_seed, 0);
  const Dataset data = ctx.generator.draw(rng);

  BootstrapConfig cfg;
  cfg.replicates = s.replicates;
  cfg.seed = derive_seed(trial_seed, 1);
  cfg.max_reject_fraction = s.max_reject_fraction;
  cfg.threads = threads;
  const auto samples =
    bootstrap_global_local(ctx.reference, ctx.alternative, data, cfg, ctx.penalty);

  TrialSmooth out{smooth(samples.global, s.density),
                  smooth(samples.local, s.density),
                  local_target(ctx.projected_reference, ctx.projected_alternative, data, ctx.penalty)
                    .value,
                  samples.global.rejected_count};
  return out;
}

/// Trials in parallel when there are several, otherwise the replicates.
template <class Fn>
void
for_each_trial(std::size_t trials, unsigned threads, Fn&& fn)
{
  if (trials > 1) {
    parallel_for(trials, threads, [&](std::size_t t) { fn(t, 1u); });
  } else {
    for (std::size_t t = 0; t < trials; ++t) {
      fn(t, threads);
    }
  }
}

double
mean_of(const std::vector<double>& v)
{
  double s = 0.0;
  for (double x : v) {
    s += x;
  }
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double
sd_of(const std::vector<double>& v)
{
  if (v.size() < 2) {
    return 0.0;
  }
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) {
    ss += (x - m) * (x - m);
  }
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

} // namespace

std::span<const TopologyCase>
topology_cases()
{
  return kCases;
}

const TopologyCase&
topology_case(int id)
{
  if (id < 1 || id > static_cast<int>(kCases.size())) {
    throw ConfigError("case must be 1..14");
  }
  return kCases[static_cast<std::size_t>(id - 1)];
}

TopologyCase
identical_spaces_case()
{
  return {0, {0.60, 0.30, 0.00}, "110", "110", "degenerate", true};
}

void
SimulationSettings::validate() const
{
  if (n < 5) {
    throw ConfigError("simulation sample size must be at least 5");
  }
  if (trials < 1) {
    throw ConfigError("trials must be at least 1");
  }
  if (replicates < 10) {
    throw ConfigError("bootstrap replicates per trial must be at least 10");
  }
  if (levels.empty()) {
    throw ConfigError("at least one interval level is required");
  }
  for (double l : levels) {
    if (!(l > 0.0 && l < 1.0)) {
      throw ConfigError("interval levels must lie in (0, 1)");
    }
  }
  if (!(sigma > 0.0) || !std::isfinite(intercept)) {
    throw ConfigError("generator sigma must be positive and the intercept finite");
  }
  if (!(max_reject_fraction >= 0.0 && max_reject_fraction < 1.0)) {
    throw ConfigError("max_reject_fraction must lie in [0, 1)");
  }
  Penalty::by_name(penalty);
}

RowMatrix
simulation_design(std::size_t n, std::uint64_t seed)
{
  return standard_normal_design(n, 3, derive_seed(seed, kDesignTag, n));
}

GaussianLinearGenerator
case_generator(const TopologyCase& c, const SimulationSettings& s)
{
  GaussianLinearGenerator g;
  g.beta = Eigen::Vector4d(s.intercept, c.slopes[0], c.slopes[1], c.slopes[2]);
  g.sigma = s.sigma;
  g.design = simulation_design(s.n, s.seed);
  g.validate();
  return g;
}

const CoverageCell&
CoverageResult::cell(double level, TargetKind kind) const
{
  for (const auto& c : cells) {
    if (c.kind == kind && std::abs(c.level - level) < 1e-12) {
      return c;
    }
  }
  throw ConfigError("no coverage cell at level " + std::to_string(level));
}

CoverageResult
run_coverage(const TopologyCase& c, const SimulationSettings& s)
{
  s.validate();
  const auto ctx = make_context(c.reference(),
                                c.alternative(),
                                case_generator(c, s),
                                s,
                                derive_seed(s.seed, kTrialTag, static_cast<std::uint64_t>(c.id)));

  CoverageResult result;
  result.case_id = c.id;
  result.n = s.n;
  result.trials = s.trials;
  result.replicates = s.replicates;
  result.seed = s.seed;
  result.global_target = global_target(ctx.generator, ctx.reference, ctx.alternative, ctx.penalty).value;
  result.records.resize(s.trials);

  for_each_trial(s.trials, s.threads, [&](std::size_t t, unsigned inner) {
    const auto sm = run_trial(ctx, t, s, inner);
    auto& rec = result.records[t];
    rec.trial = t;
    rec.local_target = sm.local_target;
    rec.rejected = sm.rejected;
    for (double level : s.levels) {
      rec.global.push_back(interval(sm.global, level));
      rec.local.push_back(interval(sm.local, level));
    }
  });

  for (std::size_t li = 0; li < s.levels.size(); ++li) {
    for (auto kind : {TargetKind::global, TargetKind::local}) {
      CoverageCell cell;
      cell.level = s.levels[li];
      cell.kind = kind;
      std::vector<double> lengths;
      lengths.reserve(s.trials);
      for (const auto& rec : result.records) {
        const auto& iv = kind == TargetKind::global ? rec.global[li] : rec.local[li];
        const double target = kind == TargetKind::global ? result.global_target : rec.local_target;
        cell.covered += iv.contains(target) ? 1 : 0;
        lengths.push_back(iv.length());
      }
      const double trials = static_cast<double>(s.trials);
      cell.coverage = static_cast<double>(cell.covered) / trials;
      cell.standard_error = std::sqrt(cell.coverage * (1.0 - cell.coverage) / trials);
      cell.mean_length = mean_of(lengths);
      cell.sd_length = sd_of(lengths);
      result.cells.push_back(cell);
    }
  }
  return result;
}

std::vector<RatioRow>
length_ratio_sweep(const TopologyCase& c,
                   std::span<const std::size_t> n_values,
                   const SimulationSettings& s,
                   double level)
{
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("interval level must lie in (0, 1)");
  }
  std::vector<RatioRow> rows;
  for (std::size_t n : n_values) {
    SimulationSettings sn = s;
    sn.n = n;
    sn.validate();
    const auto ctx = make_context(c.reference(),
                                  c.alternative(),
                                  case_generator(c, sn),
                                  sn,
                                  derive_seed(s.seed, kTrialTag, static_cast<std::uint64_t>(c.id)));

    std::vector<double> ratio(sn.trials, 0.0);
    std::vector<char> defined(sn.trials, 0);
    for_each_trial(sn.trials, sn.threads, [&](std::size_t t, unsigned inner) {
      const auto sm = run_trial(ctx, t, sn, inner);
      const double g = interval(sm.global, level).length();
      if (g > 0.0) {
        ratio[t] = interval(sm.local, level).length() / g;
        defined[t] = 1;
      }
    });

    RatioRow row;
    row.n = n;
    for (std::size_t t = 0; t < sn.trials; ++t) {
      if (defined[t]) {
        row.ratios.push_back(ratio[t]);
      } else {
        ++row.undefined;
      }
    }
    if (row.ratios.empty()) {
      continue;
    }
    row.median = empirical_quantile(row.ratios, 0.5);
    row.lower_quartile = empirical_quantile(row.ratios, 0.25);
    row.upper_quartile = empirical_quantile(row.ratios, 0.75);
    rows.push_back(std::move(row));
  }
  return rows;
}

SecurityResult
run_security_tabulation(const GaussianLinearGenerator& g,
                        const LinearModelSpace& reference,
                        const LinearModelSpace& alternative,
                        const SimulationSettings& s,
                        const Thresholds& thresholds,
                        double level)
{
  thresholds.validate();
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("interval level must lie in (0, 1)");
  }
  g.validate();
  SimulationSettings sn = s;
  sn.n = g.size();
  sn.validate();

  const auto ctx = make_context(reference, alternative, g, sn, derive_seed(s.seed, kSecurityTag));
  const auto target = global_target(ctx.generator, reference, alternative, ctx.penalty);
  const double scale = 1e-12 * std::max(1.0, static_cast<double>(sn.n));
  if (std::abs(target.divergence_part) <= scale) {
    throw EquidistantModels("both model spaces are equally divergent from the generator");
  }

  SecurityResult result;
  result.true_sign = target.divergence_part > 0.0 ? 1 : -1;
  result.divergence = target.divergence_part;
  result.level = level;
  result.trials = sn.trials;
  result.labels.resize(sn.trials);
  result.points.resize(sn.trials);

  for_each_trial(sn.trials, sn.threads, [&](std::size_t t, unsigned inner) {
    const auto sm = run_trial(ctx, t, sn, inner);
    const auto ig = interval(sm.global, level);
    const auto il = interval(sm.local, level);
    result.labels[t] = {simulation_category(ig.point, ig.lower, ig.upper, result.true_sign, thresholds),
                        simulation_category(il.point, il.lower, il.upper, result.true_sign, thresholds)};
    result.points[t] = {ig.point, il.point};
  });

  for (std::size_t k = 0; k < 2; ++k) {
    SecurityRow row;
    row.kind = k == 0 ? TargetKind::global : TargetKind::local;
    std::size_t correct = 0;
    for (std::size_t t = 0; t < sn.trials; ++t) {
      const auto label = result.labels[t][k];
      const auto it = std::find(kSimulationCategories.begin(), kSimulationCategories.end(), label);
      ++row.counts[static_cast<std::size_t>(it - kSimulationCategories.begin())];
      const double p = result.points[t][k];
      correct += (p > 0.0 && result.true_sign > 0) || (p < 0.0 && result.true_sign < 0) ? 1 : 0;
    }
    const double trials = static_cast<double>(sn.trials);
    for (std::size_t i = 0; i < row.counts.size(); ++i) {
      row.proportions[i] = static_cast<double>(row.counts[i]) / trials;
    }
    row.reliability = static_cast<double>(correct) / trials;
    result.rows.push_back(row);
  }
  return result;
}

std::span<const SecurityPreset>
security_presets()
{
  return kPresets;
}

const SecurityPreset&
security_preset(char id)
{
  for (const auto& p : kPresets) {
    if (p.id == id) {
      return p;
    }
  }
  throw ConfigError(std::string("unknown security preset '") + id + "', expected A..D");
}

} // namespace evint
