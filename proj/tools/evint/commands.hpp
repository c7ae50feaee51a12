#pragma once

#include "config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace evint::cli {

struct CommandOutput
{
  nlohmann::ordered_json result;
  std::vector<std::string> warnings;
  std::string csv; ///< empty when the command has no tabular output
};

/// Runs a completed, validated config. `threads` caps the worker count and
/// never changes the output.
CommandOutput run_command(const RunConfig& cfg, unsigned threads);

/// The full output document: schema version, embedded config, result.
nlohmann::ordered_json output_document(const RunConfig& cfg, const CommandOutput& out);

} // namespace evint::cli
