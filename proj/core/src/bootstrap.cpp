#include "evint/bootstrap.hpp"

#include "evint/errors.hpp"
#include "evint/parallel.hpp"
#include "evint/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

namespace evint {

namespace {

bool
contains(const LinearModelSpace& outer, const LinearModelSpace& inner)
{
  if (inner.has_intercept() && !outer.has_intercept()) {
    return false;
  }
  const auto& oc = outer.covariates();
  return std::all_of(inner.covariates().begin(), inner.covariates().end(), [&](std::size_t j) {
    return std::find(oc.begin(), oc.end(), j) != oc.end();
  });
}

} // namespace

std::pair<double, double>
global_evidence_bounds(const LinearModelSpace& reference, const LinearModelSpace& alternative, double c_n)
{
  const double shift = c_n * (param_count(alternative) - param_count(reference));
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  if (contains(alternative, reference)) {
    upper = shift;
  }
  if (contains(reference, alternative)) {
    lower = shift;
  }
  return {lower, upper};
}

void
BootstrapConfig::validate() const
{
  if (replicates < 1) {
    throw ConfigError("bootstrap replicate count must be at least 1");
  }
  if (replicates >= (std::size_t{1} << 48)) {
    throw ConfigError("bootstrap replicate count is too large");
  }
  if (!(max_reject_fraction >= 0.0 && max_reject_fraction < 1.0)) {
    throw ConfigError("max_reject_fraction must lie in [0, 1)");
  }
}

std::vector<std::size_t>
resample_indices(std::size_t n, std::size_t replicate, std::uint64_t seed, std::size_t attempt)
{
  const std::uint64_t stream =
    static_cast<std::uint64_t>(replicate) | (static_cast<std::uint64_t>(attempt) << 48);
  Philox4x32 rng(seed, stream);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> rows(n);
  for (auto& r : rows) {
    r = pick(rng);
  }
  return rows;
}

Dataset
resample_rows(const Dataset& data, std::size_t replicate, std::uint64_t seed, std::size_t attempt)
{
  const auto rows = resample_indices(data.size(), replicate, seed, attempt);
  return data.select_rows(rows);
}

namespace {

std::size_t
rejection_budget(const BootstrapConfig& cfg)
{
  // Largest r with r / (B + r) <= f.
  const double f = cfg.max_reject_fraction;
  return static_cast<std::size_t>(
    std::floor(f * static_cast<double>(cfg.replicates) / (1.0 - f) + 1e-9));
}

struct ReplicateOutcome
{
  double global = 0.0;
  double local = 0.0;
  std::size_t attempts = 0; // failed attempts before success
};

/// Runs `eval(indices, outcome)` for every replicate, redrawing on statistical
/// failures, then checks the rejection budget.
template <class Eval>
std::vector<ReplicateOutcome>
run_replicates(std::size_t n, const BootstrapConfig& cfg, Eval&& eval)
{
  cfg.validate();
  const std::size_t budget = rejection_budget(cfg);
  std::vector<ReplicateOutcome> out(cfg.replicates);

  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t b) {
    for (std::size_t attempt = 0; attempt <= budget; ++attempt) {
      const auto rows = resample_indices(n, b, cfg.seed, attempt);
      try {
        if (eval(rows, out[b])) {
          out[b].attempts = attempt;
          return;
        }
      } catch (const RankDeficient&) {
      } catch (const DegenerateVariance&) {
      }
    }
    throw TooManyRejections("replicate " + std::to_string(b) + " failed " +
                            std::to_string(budget + 1) + " resamples");
  });

  std::size_t rejected = 0;
  for (const auto& o : out) {
    rejected += o.attempts;
  }
  if (rejected > budget) {
    throw TooManyRejections(std::to_string(rejected) + " rejected resamples exceed the " +
                            std::to_string(cfg.max_reject_fraction) + " budget");
  }
  return out;
}

EvidenceSample
make_sample(const std::vector<ReplicateOutcome>& outcomes,
            bool local,
            EvidenceMode mode,
            const std::string& penalty,
            std::size_t n,
            const BootstrapConfig& cfg)
{
  EvidenceSample s;
  s.values.reserve(outcomes.size());
  for (const auto& o : outcomes) {
    s.values.push_back(local ? o.local : o.global);
    s.rejected_count += o.attempts;
  }
  s.mode = mode;
  s.penalty = penalty;
  s.n = n;
  s.seed = cfg.seed;
  return s;
}

/// Precomputed full-data designs for the pair of spaces.
class SpacePair
{
public:
  SpacePair(const LinearModelSpace& reference,
            const LinearModelSpace& alternative,
            const Dataset& data,
            const Penalty& penalty,
            RankPolicy policy)
    : reference_(reference)
    , alternative_(alternative)
    , data_(data)
    , policy_(policy)
    , xr_(design_matrix(reference, data))
    , xa_(design_matrix(alternative, data))
    , c_n_(penalty(data.size()))
    , pr_(param_count(reference))
    , pa_(param_count(alternative))
  {
    // Sanity gate: both spaces must fit the observed data.
    fit_design(reference_, xr_, data_.response(), policy_);
    fit_design(alternative_, xa_, data_.response(), policy_);
  }

  bool evaluate(const std::vector<std::size_t>& rows, ReplicateOutcome& out) const
  {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::VectorXd yb(n);
    Eigen::MatrixXd xrb(n, xr_.cols());
    Eigen::MatrixXd xab(n, xa_.cols());
    const auto& y = data_.response();
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
      yb(i) = y(r);
      xrb.row(i) = xr_.row(r);
      xab.row(i) = xa_.row(r);
    }
    const auto fr = fit_design(reference_, xrb, yb, policy_);
    const auto fa = fit_design(alternative_, xab, yb, policy_);

    const auto nn = rows.size();
    const double lr_boot = gaussian_log_likelihood(rss(yb, xrb, fr), fr.sigma2, nn);
    const double la_boot = gaussian_log_likelihood(rss(yb, xab, fa), fa.sigma2, nn);
    const double lr_orig = gaussian_log_likelihood(rss(y, xr_, fr), fr.sigma2, data_.size());
    const double la_orig = gaussian_log_likelihood(rss(y, xa_, fa), fa.sigma2, data_.size());

    out.global = penalized_difference(lr_boot, la_boot, c_n_, pr_, pa_);
    out.local = penalized_difference(lr_orig, la_orig, c_n_, pr_, pa_);
    return std::isfinite(out.global) && std::isfinite(out.local);
  }

private:
  static double rss(const Eigen::VectorXd& y, const Eigen::MatrixXd& x, const FittedLinearModel& f)
  {
    return x.cols() == 0 ? y.squaredNorm() : (y - x * f.beta).squaredNorm();
  }

  const LinearModelSpace& reference_;
  const LinearModelSpace& alternative_;
  const Dataset& data_;
  RankPolicy policy_;
  Eigen::MatrixXd xr_;
  Eigen::MatrixXd xa_;
  double c_n_;
  int pr_;
  int pa_;
};

EvidenceSample
bootstrap_fixed(const SpecifiedModel& reference,
                const SpecifiedModel& alternative,
                const Dataset& data,
                const BootstrapConfig& config,
                const std::string& penalty_name)
{
  // Per-row log-density differences; a replicate is a sum over resampled rows.
  const std::size_t n = data.size();
  std::vector<double> lr(n);
  std::vector<double> la(n);
  for (std::size_t i = 0; i < n; ++i) {
    lr[i] = reference.log_density(data.response(i), data.covariates(i));
    la[i] = alternative.log_density(data.response(i), data.covariates(i));
    if (!std::isfinite(lr[i]) || !std::isfinite(la[i])) {
      throw NonFiniteLikelihood("specified model density is not finite on the data");
    }
  }
  auto outcomes = run_replicates(n, config, [&](const std::vector<std::size_t>& rows, ReplicateOutcome& out) {
    double sr = 0.0;
    double sa = 0.0;
    for (auto r : rows) {
      sr += lr[r];
      sa += la[r];
    }
    out.global = penalized_difference(sr, sa, 0.0, 0, 0);
    return true;
  });
  return make_sample(outcomes, false, EvidenceMode::specified, penalty_name, n, config);
}

} // namespace

EvidenceSample
bootstrap_evidence(const SpecifiedModel& reference,
                   const SpecifiedModel& alternative,
                   const Dataset& data,
                   const BootstrapConfig& config)
{
  return bootstrap_fixed(reference, alternative, data, config, "none");
}

EvidenceSample
bootstrap_evidence(const LinearModelSpace& reference,
                   const LinearModelSpace& alternative,
                   const Dataset& data,
                   const BootstrapConfig& config,
                   const Penalty& penalty)
{
  if (config.mode == EvidenceMode::specified) {
    auto fr = fit_mle(reference, data, config.rank_policy);
    auto fa = fit_mle(alternative, data, config.rank_policy);
    return bootstrap_fixed(SpecifiedModel::from_fit(std::move(fr)),
                           SpecifiedModel::from_fit(std::move(fa)),
                           data,
                           config,
                           "none");
  }
  const SpacePair pair(reference, alternative, data, penalty, config.rank_policy);
  auto outcomes = run_replicates(data.size(), config, [&](const auto& rows, ReplicateOutcome& out) {
    return pair.evaluate(rows, out);
  });
  auto sample = make_sample(outcomes,
                            config.mode == EvidenceMode::local,
                            config.mode,
                            penalty.name,
                            data.size(),
                            config);
  if (config.mode == EvidenceMode::global) {
    std::tie(sample.lower_bound, sample.upper_bound) =
      global_evidence_bounds(reference, alternative, penalty(data.size()));
  }
  return sample;
}

GlobalLocalSamples
bootstrap_global_local(const LinearModelSpace& reference,
                       const LinearModelSpace& alternative,
                       const Dataset& data,
                       const BootstrapConfig& config,
                       const Penalty& penalty)
{
  const SpacePair pair(reference, alternative, data, penalty, config.rank_policy);
  auto outcomes = run_replicates(data.size(), config, [&](const auto& rows, ReplicateOutcome& out) {
    return pair.evaluate(rows, out);
  });
  GlobalLocalSamples out{make_sample(outcomes, false, EvidenceMode::global, penalty.name, data.size(), config),
                         make_sample(outcomes, true, EvidenceMode::local, penalty.name, data.size(), config)};
  std::tie(out.global.lower_bound, out.global.upper_bound) =
    global_evidence_bounds(reference, alternative, penalty(data.size()));
  return out;
}

} // namespace evint
