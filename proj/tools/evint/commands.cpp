#include "commands.hpp"

#include "evint/analysis.hpp"
#include "evint/classification.hpp"
#include "evint/dataset.hpp"
#include "evint/errors.hpp"
#include "evint/lincoln_petersen.hpp"
#include "evint/profile.hpp"
#include "evint/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

namespace evint::cli {

namespace {

using ojson = nlohmann::ordered_json;

// 17 significant digits so a CSV value parses back to the same double.
std::string
num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter
{
public:
  explicit CsvWriter(std::initializer_list<std::string_view> header)
  {
    bool first = true;
    for (auto h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << '\n';
  }

  template <class... Cells>
  void row(const Cells&... cells)
  {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(std::string_view s)
  {
    if (s.find_first_of(",\"\n") == std::string_view::npos) {
      return std::string(s);
    }
    std::string q = "\"";
    for (char c : s) {
      q += c;
      if (c == '"') {
        q += '"';
      }
    }
    return q + '"';
  }
  static std::string cell(const std::string& s) { return cell(std::string_view(s)); }
  static std::string cell(const char* s) { return cell(std::string_view(s)); }

  std::ostringstream out_;
};

DensityOptions
density_options(const RunConfig& c)
{
  DensityOptions d;
  d.estimator = c.estimator == "gaussian_kde" ? DensityEstimator::gaussian_kde : DensityEstimator::log_quadratic;
  d.bandwidth_rule = c.bandwidth_rule == "plugin" ? BandwidthRule::plugin : BandwidthRule::silverman;
  return d;
}

Thresholds
thresholds(const RunConfig& c)
{
  Thresholds t;
  t.prognostic = c.prognostic;
  t.strong = c.strong;
  t.validate();
  return t;
}

SimulationSettings
simulation_settings(const RunConfig& c, unsigned threads)
{
  SimulationSettings s;
  s.n = c.n;
  s.trials = c.trials;
  s.replicates = c.replicates;
  s.seed = c.seed;
  s.levels = c.levels;
  s.penalty = c.penalty;
  s.max_reject_fraction = c.max_reject_fraction;
  s.threads = threads;
  s.density = density_options(c);
  s.validate();
  return s;
}

LinearModelSpace
space_from_names(const Dataset& data, const std::vector<std::string>& names)
{
  std::vector<std::size_t> idx;
  for (const auto& name : names) {
    idx.push_back(data.covariate_index(name));
  }
  return LinearModelSpace(std::move(idx), true);
}

const char*
kind_name(TargetKind k)
{
  return k == TargetKind::global ? "global" : "local";
}

// ---------------------------------------------------------------------------

ojson
kind_json(const KindReport& k)
{
  ojson j;
  j["point"] = k.point;
  j["category"] = std::string(to_string(k.category));
  j["bandwidth"] = k.bandwidth;
  j["point_mass"] = k.point_mass;
  j["rejected"] = k.rejected;
  ojson levels = ojson::array();
  for (const auto& l : k.levels) {
    levels.push_back({{"level", l.interval.level},
                      {"lower", l.interval.lower},
                      {"upper", l.interval.upper},
                      {"security", std::string(to_code(l.security))},
                      {"point_outside", l.point_outside}});
  }
  j["intervals"] = std::move(levels);
  return j;
}

CommandOutput
analyze_command(const RunConfig& c, unsigned threads)
{
  const Dataset data = read_csv(std::filesystem::path(c.input), c.response);
  AnalysisConfig a;
  a.reference = space_from_names(data, c.reference);
  a.alternative = space_from_names(data, c.alternative);
  a.replicates = c.replicates;
  a.seed = c.seed;
  a.levels = c.levels;
  a.global = c.mode != "local";
  a.local = c.mode != "global";
  a.penalty = c.penalty;
  a.thresholds = thresholds(c);
  a.threads = threads;
  a.max_reject_fraction = c.max_reject_fraction;
  a.rank_policy = c.rank_policy == "minimum_norm" ? RankPolicy::minimum_norm : RankPolicy::reject;
  a.density = density_options(c);

  const auto report = analyze(data, a);
  CommandOutput out;
  auto& r = out.result;
  r["n"] = report.n;
  r["B"] = report.replicates;
  r["seed"] = report.seed;
  r["penalty"] = report.penalty;
  r["reference"] = report.reference_label;
  r["alternative"] = report.alternative_label;
  r["observed"] = report.observed;
  if (report.global) {
    r["global"] = kind_json(*report.global);
  }
  if (report.local) {
    r["local"] = kind_json(*report.local);
  }
  out.warnings = report.warnings;
  return out;
}

CommandOutput
simulate_command(const RunConfig& c, unsigned threads)
{
  const auto s = simulation_settings(c, threads);
  CommandOutput out;
  CsvWriter csv({"case", "n", "trials", "B", "seed", "level", "kind", "covered", "coverage", "standard_error",
                 "mean_length", "sd_length", "global_target"});
  ojson cases = ojson::array();
  for (int id : c.cases) {
    const auto r = run_coverage(topology_case(id), s);
    ojson cells = ojson::array();
    for (const auto& cell : r.cells) {
      csv.row(id, r.n, r.trials, r.replicates, std::to_string(r.seed), cell.level, kind_name(cell.kind), cell.covered,
              cell.coverage, cell.standard_error, cell.mean_length, cell.sd_length, r.global_target);
      cells.push_back({{"level", cell.level},
                       {"kind", kind_name(cell.kind)},
                       {"covered", cell.covered},
                       {"coverage", cell.coverage},
                       {"standard_error", cell.standard_error},
                       {"mean_length", cell.mean_length},
                       {"sd_length", cell.sd_length}});
    }
    cases.push_back({{"case", id}, {"global_target", r.global_target}, {"cells", std::move(cells)}});
  }
  out.result["cases"] = std::move(cases);
  out.csv = csv.str();
  return out;
}

CommandOutput
ratio_sweep_command(const RunConfig& c, unsigned threads)
{
  const auto s = simulation_settings(c, threads);
  CommandOutput out;
  CsvWriter csv({"case", "n", "ratio"});
  ojson cases = ojson::array();
  for (int id : c.cases) {
    const auto rows = length_ratio_sweep(topology_case(id), c.n_values, s, c.levels.front());
    ojson jr = ojson::array();
    for (const auto& row : rows) {
      for (double ratio : row.ratios) {
        csv.row(id, row.n, ratio);
      }
      jr.push_back({{"n", row.n},
                    {"median", row.median},
                    {"lower_quartile", row.lower_quartile},
                    {"upper_quartile", row.upper_quartile},
                    {"defined", row.ratios.size()},
                    {"undefined", row.undefined}});
    }
    if (rows.size() < c.n_values.size()) {
      out.warnings.push_back("case " + std::to_string(id) + ": some sample sizes had only zero-length intervals");
    }
    cases.push_back({{"case", id}, {"rows", std::move(jr)}});
  }
  out.result["level"] = c.levels.front();
  out.result["cases"] = std::move(cases);
  out.csv = csv.str();
  return out;
}

CommandOutput
security_command(const RunConfig& c, unsigned threads)
{
  const auto s = simulation_settings(c, threads);
  const auto t = thresholds(c);
  CommandOutput out;
  CsvWriter csv({"preset", "kind", "MS", "CS", "MI", "CI", "W", "PI", "SI", "PS", "SS", "reliability"});
  ojson presets = ojson::array();
  for (const auto& id : c.presets) {
    const auto& p = security_preset(id[0]);
    const TopologyCase topo{0, p.slopes, p.reference_mask, p.alternative_mask, "", true};
    const auto r = run_security_tabulation(case_generator(topo, s), topo.reference(), topo.alternative(), s, t,
                                           c.levels.front());
    ojson rows = ojson::array();
    for (const auto& row : r.rows) {
      const auto& q = row.proportions;
      csv.row(id, kind_name(row.kind), q[0], q[1], q[2], q[3], q[4], q[5], q[6], q[7], q[8], row.reliability);
      ojson counts;
      ojson props;
      for (std::size_t k = 0; k < kSimulationCategories.size(); ++k) {
        const std::string code(to_code(kSimulationCategories[k]));
        counts[code] = row.counts[k];
        props[code] = row.proportions[k];
      }
      rows.push_back({{"kind", kind_name(row.kind)},
                      {"counts", std::move(counts)},
                      {"proportions", std::move(props)},
                      {"reliability", row.reliability}});
    }
    presets.push_back({{"preset", id},
                       {"adequacy", p.adequacy},
                       {"reference", p.reference_mask},
                       {"alternative", p.alternative_mask},
                       {"true_sign", r.true_sign},
                       {"divergence", r.divergence},
                       {"rows", std::move(rows)}});
  }
  out.result["level"] = c.levels.front();
  out.result["trials"] = c.trials;
  out.result["presets"] = std::move(presets);
  out.csv = csv.str();
  return out;
}

CommandOutput
lp_command(const RunConfig& c)
{
  const LPData d{c.m, c.n2, c.x};
  d.validate();
  const auto T = lp_estimate(d);
  const double phi = lp_capture_prob(d);
  const auto opts = density_options(c);

  CommandOutput out;
  out.result["estimate"] = T;
  out.result["capture_probability"] = phi;
  CsvWriter csv({"scheme", "value", "density"});
  ojson schemes = ojson::array();
  for (auto scheme : {LPScheme::both_fixed, LPScheme::m_fixed, LPScheme::none_fixed}) {
    const auto sample = lp_bootstrap(T, phi, c.m, c.n2, scheme, c.replicates, c.seed);
    ojson intervals = ojson::array();
    for (double level : c.levels) {
      const auto iv = lp_interval(sample, level, opts);
      intervals.push_back({{"level", level}, {"lower", iv.lower}, {"upper", iv.upper}});
    }
    const std::string name(to_string(scheme));
    const auto sm = smooth(sample.estimates, opts);
    if (const auto* dens = std::get_if<SmoothedDensity>(&sm)) {
      for (std::size_t i = 0; i < dens->grid().size(); ++i) {
        csv.row(name, dens->grid()[i], dens->density()[i]);
      }
    }
    schemes.push_back({{"scheme", name},
                       {"draws", sample.draws},
                       {"discarded", sample.discarded},
                       {"mean", smoothed_mean(sm)},
                       {"intervals", std::move(intervals)}});
  }
  out.result["schemes"] = std::move(schemes);
  out.csv = csv.str();
  return out;
}

std::shared_ptr<const ProfileFamily>
profile_family(const RunConfig& c, const Dataset& data)
{
  if (c.family == "normal-mean") {
    return std::make_shared<NormalFamily>(NormalInterest::mean);
  }
  if (c.family == "normal-variance") {
    return std::make_shared<NormalFamily>(NormalInterest::variance);
  }
  const auto space = space_from_names(data, c.covariates);
  if (c.family == "regression-variance") {
    return std::make_shared<RegressionFamily>(RegressionFamily::variance(space));
  }
  std::size_t position = 0;
  if (c.interest != "intercept") {
    const auto it = std::find(c.covariates.begin(), c.covariates.end(), c.interest);
    if (it == c.covariates.end()) {
      throw ConfigError("interest '" + c.interest + "' is not among the covariates");
    }
    position = 1 + static_cast<std::size_t>(it - c.covariates.begin());
  }
  return std::make_shared<RegressionFamily>(RegressionFamily::coefficient(space, position));
}

CommandOutput
profile_command(const RunConfig& c)
{
  Dataset data = read_csv(std::filesystem::path(c.input), c.response);
  ProfileProblem p;
  p.family = profile_family(c, data);
  p.data = std::move(data);
  p.solver = c.solver == "numeric" ? InnerSolver::numeric : InnerSolver::analytic;
  p.simulation = c.simulation == "at_gamma" ? SimulationPoint::at_gamma : SimulationPoint::joint_mle;

  CommandOutput out;
  std::vector<double> lambda;
  out.result["family"] = p.family->name();
  out.result["mle"] = p.family->mle(p.data, lambda);
  out.result["nuisance_mle"] = lambda;

  ojson maxima;
  const std::array<std::pair<ProfileCurve, const char*>, 3> curves = {
    {{ProfileCurve::profile, "profile"}, {ProfileCurve::adjusted, "adjusted"}, {ProfileCurve::et_adjusted, "et_adjusted"}}};
  for (const auto& [curve, name] : curves) {
    const auto top = maximize_curve(p, curve, c.lower, c.upper, c.replicates, c.seed);
    maxima[name] = {{"gamma", top.gamma}, {"profile", top.profile}, {"adjusted", top.adjusted}, {"et_adjusted", top.et_adjusted}};
  }
  out.result["maxima"] = std::move(maxima);

  CsvWriter csv({"gamma", "profile", "adjusted", "et_adjusted"});
  for (std::size_t i = 0; i < c.points; ++i) {
    const double g = c.lower + (c.upper - c.lower) * static_cast<double>(i) / static_cast<double>(c.points - 1);
    const auto pt = profile_point(p, g, c.replicates, c.seed);
    csv.row(pt.gamma, pt.profile, pt.adjusted, pt.et_adjusted);
  }
  out.csv = csv.str();
  return out;
}

} // namespace

CommandOutput
run_command(const RunConfig& c, unsigned threads)
{
  if (c.command == "analyze") {
    return analyze_command(c, threads);
  }
  if (c.command == "simulate") {
    return simulate_command(c, threads);
  }
  if (c.command == "ratio-sweep") {
    return ratio_sweep_command(c, threads);
  }
  if (c.command == "security") {
    return security_command(c, threads);
  }
  if (c.command == "lp") {
    return lp_command(c);
  }
  if (c.command == "profile") {
    return profile_command(c);
  }
  throw ConfigError("unknown command '" + c.command + "'");
}

nlohmann::ordered_json
output_document(const RunConfig& cfg, const CommandOutput& out)
{
  ojson doc;
  doc["schema_version"] = kSchemaVersion;
  doc["config"] = to_json(cfg);
  doc["result"] = out.result;
  doc["warnings"] = out.warnings;
  return doc;
}

} // namespace evint::cli
