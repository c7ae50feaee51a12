#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace evint::cli {

inline constexpr int kSchemaVersion = 1;

/// Everything that determines a command's numeric output. Output paths and
/// the thread cap are deliberately absent: they never change the numbers.
struct RunConfig
{
  std::string command;

  std::uint64_t seed = 0;
  std::size_t replicates = 0; ///< 0 picks the command's default
  std::vector<double> levels;
  std::string mode = "both";
  std::string penalty = "sic";
  double prognostic = 4.0;
  double strong = 7.0;
  std::string estimator = "log_quadratic";
  std::string bandwidth_rule = "silverman";

  // analyze, profile
  std::string input;
  std::string response = "y";
  std::vector<std::string> reference;
  std::vector<std::string> alternative;
  std::string rank_policy = "reject";
  double max_reject_fraction = 0.05;

  // simulate, ratio-sweep, security
  std::vector<int> cases;
  std::vector<std::string> presets;
  std::size_t trials = 300;
  std::size_t n = 100;
  std::vector<std::size_t> n_values;

  // lp
  std::int64_t m = 0;
  std::int64_t n2 = 0;
  std::int64_t x = 0;

  // profile
  std::string family;
  std::string interest;
  std::vector<std::string> covariates;
  std::string solver = "analytic";
  std::string simulation = "joint_mle";
  double lower = 0.0;
  double upper = 0.0;
  std::size_t points = 41;

  /// Fills command-dependent defaults (B, levels, case lists).
  void complete();

  /// @throws ConfigError
  void validate() const;
};

/// Only the fields the command reads.
nlohmann::ordered_json to_json(const RunConfig& c);

/// Accepts either a bare config or a whole output document with a "config"
/// member. @throws ConfigError on unknown commands or mistyped fields.
RunConfig config_from_json(const nlohmann::json& j);

} // namespace evint::cli
