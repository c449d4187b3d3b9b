#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "trion/cli/config.hpp"
#include "trion/cli/table.hpp"

namespace trion::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kIoFailure = 4 };

Table run_spectrum(const RunConfig& cfg);
Table run_evolve(const RunConfig& cfg);
Table run_entangle(const RunConfig& cfg);
Table run_crossings(const RunConfig& cfg);

// Dispatches on the command name. Throws ConfigError for unknown commands.
Table run_command(const std::string& command, const RunConfig& cfg);

// Entry point of the trion-floquet executable: parses arguments, runs the
// command, writes the output and maps failures to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trion::cli
