#include "config.hpp"

#include "evint/errors.hpp"
#include "evint/evidence.hpp"

#include <algorithm>
#include <array>
#include <string_view>

namespace evint::cli {

namespace {

constexpr std::array<std::string_view, 6> kCommands = {"analyze", "simulate", "ratio-sweep", "security", "lp", "profile"};

bool
one_of(const std::string& s, std::initializer_list<std::string_view> options)
{
  return std::find(options.begin(), options.end(), s) != options.end();
}

void
require(bool ok, const std::string& message)
{
  if (!ok) {
    throw ConfigError(message);
  }
}

bool
is(const RunConfig& c, std::initializer_list<std::string_view> commands)
{
  return one_of(c.command, commands);
}

} // namespace

void
RunConfig::complete()
{
  if (replicates == 0) {
    replicates = command == "analyze" ? 4000 : command == "lp" ? 10000 : 1000;
  }
  if (levels.empty()) {
    if (is(*this, {"analyze", "simulate"})) {
      levels = {0.95, 0.90};
    } else if (command == "security") {
      levels = {0.90};
    } else {
      levels = {0.95};
    }
  }
  if (cases.empty()) {
    if (command == "simulate") {
      for (int id = 1; id <= 14; ++id) {
        cases.push_back(id);
      }
    } else if (command == "ratio-sweep") {
      cases = {1, 4};
    }
  }
  if (n_values.empty() && command == "ratio-sweep") {
    n_values = {25, 50, 100, 200, 400};
  }
  if (presets.empty() && command == "security") {
    presets = {"A", "B", "C", "D"};
  }
}

void
RunConfig::validate() const
{
  require(std::find(kCommands.begin(), kCommands.end(), command) != kCommands.end(),
          "unknown command '" + command + "'");
  require(replicates >= 1, "B must be at least 1");
  for (double l : levels) {
    require(l > 0.0 && l < 1.0, "levels must lie strictly between 0 and 1");
  }
  require(one_of(mode, {"global", "local", "both"}), "mode must be global, local or both");
  Penalty::by_name(penalty);
  require(one_of(estimator, {"log_quadratic", "gaussian_kde"}), "estimator must be log_quadratic or gaussian_kde");
  require(one_of(bandwidth_rule, {"silverman", "plugin"}), "bandwidth rule must be silverman or plugin");
  require(one_of(rank_policy, {"reject", "minimum_norm"}), "rank policy must be reject or minimum_norm");

  if (is(*this, {"analyze", "profile"})) {
    require(!input.empty(), "--input is required");
  }
  if (is(*this, {"ratio-sweep", "security"})) {
    require(levels.size() == 1, command + " takes a single --level");
  }
  for (int id : cases) {
    require(id >= 1 && id <= 14, "case must be 1..14");
  }
  for (const auto& p : presets) {
    require(p.size() == 1 && p[0] >= 'A' && p[0] <= 'D', "preset must be one of A, B, C, D");
  }
  if (command == "simulate" || command == "security") {
    require(trials >= 1, "--trials must be at least 1");
  }
  if (command == "profile") {
    require(one_of(family, {"normal-mean", "normal-variance", "regression-coefficient", "regression-variance"}),
            "family must be normal-mean, normal-variance, regression-coefficient or regression-variance");
    require(one_of(solver, {"analytic", "numeric"}), "solver must be analytic or numeric");
    require(one_of(simulation, {"joint_mle", "at_gamma"}), "simulation must be joint_mle or at_gamma");
    require(lower < upper, "profile needs --lower < --upper");
    require(points >= 2, "--points must be at least 2");
    if (family == "regression-coefficient") {
      require(!interest.empty(), "regression-coefficient needs --interest (a covariate or 'intercept')");
    }
  }
}

nlohmann::ordered_json
to_json(const RunConfig& c)
{
  nlohmann::ordered_json j;
  j["command"] = c.command;
  j["seed"] = c.seed;
  j["B"] = c.replicates;
  const auto density = [&] {
    j["density"] = {{"estimator", c.estimator}, {"bandwidth_rule", c.bandwidth_rule}};
  };
  const auto thresholds = [&] {
    j["thresholds"] = {{"prognostic", c.prognostic}, {"strong", c.strong}};
  };

  if (c.command == "analyze") {
    j["input"] = c.input;
    j["response"] = c.response;
    j["reference"] = c.reference;
    j["alternative"] = c.alternative;
    j["levels"] = c.levels;
    j["mode"] = c.mode;
    j["penalty"] = c.penalty;
    thresholds();
    density();
    j["rank_policy"] = c.rank_policy;
    j["max_reject_fraction"] = c.max_reject_fraction;
  } else if (c.command == "simulate") {
    j["cases"] = c.cases;
    j["trials"] = c.trials;
    j["n"] = c.n;
    j["levels"] = c.levels;
    j["penalty"] = c.penalty;
    density();
    j["max_reject_fraction"] = c.max_reject_fraction;
  } else if (c.command == "ratio-sweep") {
    j["cases"] = c.cases;
    j["n_values"] = c.n_values;
    j["trials"] = c.trials;
    j["levels"] = c.levels;
    j["penalty"] = c.penalty;
    density();
    j["max_reject_fraction"] = c.max_reject_fraction;
  } else if (c.command == "security") {
    j["presets"] = c.presets;
    j["trials"] = c.trials;
    j["n"] = c.n;
    j["levels"] = c.levels;
    j["penalty"] = c.penalty;
    thresholds();
    density();
    j["max_reject_fraction"] = c.max_reject_fraction;
  } else if (c.command == "lp") {
    j["m"] = c.m;
    j["n2"] = c.n2;
    j["x"] = c.x;
    j["levels"] = c.levels;
    density();
  } else if (c.command == "profile") {
    j["input"] = c.input;
    j["response"] = c.response;
    j["family"] = c.family;
    j["interest"] = c.interest;
    j["covariates"] = c.covariates;
    j["solver"] = c.solver;
    j["simulation"] = c.simulation;
    j["lower"] = c.lower;
    j["upper"] = c.upper;
    j["points"] = c.points;
  }
  return j;
}

RunConfig
config_from_json(const nlohmann::json& doc)
{
  const nlohmann::json& j = doc.contains("config") ? doc.at("config") : doc;
  require(j.is_object(), "config must be a JSON object");
  RunConfig c;
  try {
    c.command = j.at("command").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config has no \"command\" string");
  }
  require(std::find(kCommands.begin(), kCommands.end(), c.command) != kCommands.end(),
          "unknown command '" + c.command + "'");

  // Keys outside the command's own field set are typos, not extensions.
  const auto known = to_json(c);
  for (const auto& [key, value] : j.items()) {
    require(known.contains(key), "unknown config field '" + key + "' for " + c.command);
  }

  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) {
        j.at(key).get_to(field);
      }
    };
    get("seed", c.seed);
    get("B", c.replicates);
    get("levels", c.levels);
    get("mode", c.mode);
    get("penalty", c.penalty);
    if (j.contains("thresholds")) {
      const auto& t = j.at("thresholds");
      c.prognostic = t.value("prognostic", c.prognostic);
      c.strong = t.value("strong", c.strong);
    }
    if (j.contains("density")) {
      const auto& d = j.at("density");
      c.estimator = d.value("estimator", c.estimator);
      c.bandwidth_rule = d.value("bandwidth_rule", c.bandwidth_rule);
    }
    get("input", c.input);
    get("response", c.response);
    get("reference", c.reference);
    get("alternative", c.alternative);
    get("rank_policy", c.rank_policy);
    get("max_reject_fraction", c.max_reject_fraction);
    get("cases", c.cases);
    get("presets", c.presets);
    get("trials", c.trials);
    get("n", c.n);
    get("n_values", c.n_values);
    get("m", c.m);
    get("n2", c.n2);
    get("x", c.x);
    get("family", c.family);
    get("interest", c.interest);
    get("covariates", c.covariates);
    get("solver", c.solver);
    get("simulation", c.simulation);
    get("lower", c.lower);
    get("upper", c.upper);
    get("points", c.points);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config field: ") + e.what());
  }
  c.complete();
  return c;
}

} // namespace evint::cli
