#pragma once

#include "topobus/config.hpp"

#include <iosfwd>
#include <string>

namespace topobus::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Output bytes of one experiment; deterministic in (config, seed).
std::string render_experiment(const std::string& subcommand, const RunConfig& config);

/// File name used when the config gives no output path.
std::string default_output_name(const std::string& subcommand, const RunConfig& config);

/// Runs a subcommand end to end: renders and writes the output file.
/// Returns 0 on success, 1 on validation errors, 2 on runtime errors;
/// diagnostics go to `err`.
int run(const std::string& subcommand, const RunConfig& config, std::ostream& err);

}  // namespace topobus::cli
