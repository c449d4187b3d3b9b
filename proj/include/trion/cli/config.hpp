#pragma once

// Run configuration for trion-floquet: JSON documents layered as
// preset <- config file <- command-line overrides.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "trion/entangle.hpp"
#include "trion/evolve.hpp"
#include "trion/floquet.hpp"
#include "trion/model.hpp"

namespace trion::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

struct RunConfig {
  ModelParams model;
  IntegratorConfig integrator;
  SweepRequest sweep;
  CrossingOptions crossings;
  int n_periods = 30;  // evolve / entangle duration in drive periods
  StateVector initial_state;
  EntangleRequest entangle;
  int workers = 0;
  std::string out_path;  // empty: standard output
  OutputFormat format = OutputFormat::csv;
  std::vector<std::string> warnings;
};

std::vector<std::string> preset_names();
// Throws ConfigError for unknown names.
nlohmann::json preset(const std::string& name);

// Parses "a.b.c=value" into {"a":{"b":{"c":value}}}; value is read as JSON
// when it parses, otherwise as a string.
nlohmann::json override_patch(const std::string& assignment);

// preset_name (or the file's "preset" key when empty) <- file <- overrides.
nlohmann::json layer_config(const std::string& preset_name, const nlohmann::json& file,
                            const std::vector<std::string>& overrides);

nlohmann::json read_json_file(const std::string& path);

// Validates and converts a layered document. Unknown keys, wrong types and
// out-of-range values raise ConfigError.
RunConfig to_run_config(const nlohmann::json& doc);

}  // namespace trion::cli
