// evint: bootstrap evidence intervals from the command line.
//
// Every run prints (or writes with -o) a JSON document that embeds the full
// config; `evint --config that.json` repeats the run byte for byte.
// Exit codes: 0 ok, 2 bad input or config, 3 statistical failure.

#include "commands.hpp"
#include "config.hpp"

#include "evint/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>

namespace {

using evint::cli::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitStatistical = 3;

void
common_options(CLI::App* sub, RunConfig& cfg)
{
  sub->add_option("--seed", cfg.seed, "master seed");
  sub->add_option("--B", cfg.replicates, "bootstrap replicates (default depends on the command)");
  sub->add_option("--level", cfg.levels, "interval level, repeatable");
  sub->add_option("--estimator", cfg.estimator, "density estimator")
    ->check(CLI::IsMember({"log_quadratic", "gaussian_kde"}));
  sub->add_option("--bandwidth-rule", cfg.bandwidth_rule, "bandwidth rule")
    ->check(CLI::IsMember({"silverman", "plugin"}));
}

void
penalty_option(CLI::App* sub, RunConfig& cfg)
{
  sub->add_option("--penalty", cfg.penalty, "complexity penalty")->check(CLI::IsMember({"sic", "aic"}));
  sub->add_option("--max-reject", cfg.max_reject_fraction, "largest tolerated fraction of redrawn resamples");
}

void
threshold_options(CLI::App* sub, RunConfig& cfg)
{
  sub->add_option("--prognostic", cfg.prognostic, "prognostic evidence threshold");
  sub->add_option("--strong", cfg.strong, "strong evidence threshold");
}

void
drop_empty(std::vector<std::string>& names)
{
  std::erase_if(names, [](const std::string& s) { return s.empty(); });
}

void
write_text(const std::string& path, const std::string& text)
{
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw evint::ConfigError("cannot write '" + path + "'");
  }
  f << text;
}

RunConfig
load_config(const std::string& path)
{
  std::ifstream f(path);
  if (!f) {
    throw evint::ConfigError("cannot open config '" + path + "'");
  }
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw evint::ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return evint::cli::config_from_json(j);
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{"Bootstrap evidence intervals for comparing model spaces"};
  app.require_subcommand(0, 1);

  RunConfig cfg;
  std::string config_path;
  std::string output_path;
  std::string csv_path;
  unsigned threads = 0;
  app.add_option("--config", config_path, "repeat the run described by a config or an earlier JSON output");
  app.add_option("-o,--output", output_path, "JSON output file (default stdout)");
  app.add_option("--csv", csv_path, "CSV output file for tabular results");
  app.add_option("--threads", threads, "worker cap, 0 for all cores; never changes results");

  auto* analyze = app.add_subcommand("analyze", "evidence and intervals for two model spaces on a CSV dataset");
  analyze->add_option("--input", cfg.input, "CSV file with a header row")->required();
  analyze->add_option("--response", cfg.response, "response column")->capture_default_str();
  analyze->add_option("--reference", cfg.reference, "reference covariates, comma separated ('' for intercept only)")
    ->delimiter(',')
    ->required();
  analyze->add_option("--alternative", cfg.alternative, "alternative covariates, comma separated")
    ->delimiter(',')
    ->required();
  analyze->add_option("--mode", cfg.mode, "which intervals")->check(CLI::IsMember({"global", "local", "both"}));
  analyze->add_option("--rank-policy", cfg.rank_policy, "collinear designs")
    ->check(CLI::IsMember({"reject", "minimum_norm"}));
  common_options(analyze, cfg);
  penalty_option(analyze, cfg);
  threshold_options(analyze, cfg);

  auto* simulate = app.add_subcommand("simulate", "coverage study over the regression topology cases");
  simulate->add_option("--case", cfg.cases, "topology case 1..14, repeatable (default all)");
  simulate->add_option("--trials", cfg.trials, "simulated datasets per case")->capture_default_str();
  simulate->add_option("--n", cfg.n, "sample size")->capture_default_str();
  common_options(simulate, cfg);
  penalty_option(simulate, cfg);

  auto* sweep = app.add_subcommand("ratio-sweep", "local to global interval length ratios across sample sizes");
  sweep->add_option("--case", cfg.cases, "topology case, repeatable (default 1 and 4)");
  sweep->add_option("--n", cfg.n_values, "sample size, repeatable (default 25 50 100 200 400)");
  sweep->add_option("--trials", cfg.trials, "simulated datasets per sample size")->capture_default_str();
  common_options(sweep, cfg);
  penalty_option(sweep, cfg);

  auto* security = app.add_subcommand("security", "security categories and reliability for the preset scenarios");
  security->add_option("--preset", cfg.presets, "A, B, C or D, repeatable (default all)");
  security->add_option("--trials", cfg.trials, "simulated datasets per preset")->capture_default_str();
  security->add_option("--n", cfg.n, "sample size")->capture_default_str();
  common_options(security, cfg);
  penalty_option(security, cfg);
  threshold_options(security, cfg);

  auto* lp = app.add_subcommand("lp", "Lincoln-Petersen estimate with intervals for three conditioning schemes");
  lp->add_option("--m", cfg.m, "marked on the first visit")->required();
  lp->add_option("--n2", cfg.n2, "caught on the second visit")->required();
  lp->add_option("--x", cfg.x, "marked among the second catch")->required();
  common_options(lp, cfg);

  auto* profile = app.add_subcommand("profile", "profile and simulation-adjusted profile likelihood curves");
  profile->add_option("--input", cfg.input, "CSV file with a header row")->required();
  profile->add_option("--response", cfg.response, "response column")->capture_default_str();
  profile->add_option("--family", cfg.family, "model family")
    ->check(CLI::IsMember({"normal-mean", "normal-variance", "regression-coefficient", "regression-variance"}))
    ->required();
  profile->add_option("--covariates", cfg.covariates, "regression covariates, comma separated")->delimiter(',');
  profile->add_option("--interest", cfg.interest, "coefficient of interest: a covariate or 'intercept'");
  profile->add_option("--solver", cfg.solver, "nuisance maximizer")->check(CLI::IsMember({"analytic", "numeric"}));
  profile->add_option("--simulation", cfg.simulation, "where bootstrap samples are drawn")
    ->check(CLI::IsMember({"joint_mle", "at_gamma"}));
  profile->add_option("--lower", cfg.lower, "lower end of the interest range")->required();
  profile->add_option("--upper", cfg.upper, "upper end of the interest range")->required();
  profile->add_option("--points", cfg.points, "curve points written to the CSV")->capture_default_str();
  common_options(profile, cfg);

  for (auto* sub : app.get_subcommands({})) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    const auto chosen = app.get_subcommands();
    if (!config_path.empty()) {
      if (!chosen.empty()) {
        throw evint::ConfigError("--config replaces the subcommand; give one or the other");
      }
      cfg = load_config(config_path);
    } else {
      if (chosen.empty()) {
        throw evint::ConfigError("a subcommand or --config is required (see --help)");
      }
      cfg.command = chosen.front()->get_name();
      drop_empty(cfg.reference);
      drop_empty(cfg.alternative);
      drop_empty(cfg.covariates);
      cfg.complete();
    }
    cfg.validate();

    const auto out = evint::cli::run_command(cfg, threads);
    for (const auto& w : out.warnings) {
      std::cerr << "evint: warning: " << w << '\n';
    }
    write_text(output_path, evint::cli::output_document(cfg, out).dump(2) + "\n");
    if (!csv_path.empty() && !out.csv.empty()) {
      write_text(csv_path, out.csv);
    }
    return kExitOk;
  } catch (const evint::InputError& e) {
    std::cerr << "evint: error: " << e.what() << '\n';
    return kExitInput;
  } catch (const evint::StatisticalError& e) {
    std::cerr << "evint: statistical failure: " << e.what() << '\n';
    return kExitStatistical;
  } catch (const evint::Error& e) {
    std::cerr << "evint: error: " << e.what() << '\n';
    return kExitStatistical;
  } catch (const std::exception& e) {
    std::cerr << "evint: internal error: " << e.what() << '\n';
    return 1;
  }
}
