#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hsmod/io.hpp"
#include "hsmod/solver.hpp"

namespace hsmod {

inline constexpr const char* kSchemaVersion = "1";

struct ExperimentConfig {
  std::string experiment;
  std::string mesh = "octmin";
  int rank = 2;
  std::uint64_t rng_seed = 0;
  NewtonConfig tolerances;
  std::string output = "report.json";
  bool trace = false;
  void validate() const;
};

const std::vector<std::string>& experiment_names();

// Parses a configuration document; diagnostics name the line or field.
ExperimentConfig parse_config(const std::string& text);
Json config_to_json(const ExperimentConfig& cfg);

struct RunResult {
  Json report;
  Trace trace;
  int exit_code = 0;
};

// Runs one experiment. Solver failures land in the report with a non-ok
// status; configuration errors are thrown.
RunResult run(const ExperimentConfig& cfg);

// (metric_name, value) rows from the report's metrics block.
std::string emit_csv(const Json& report);

// Exit code for an error kind: 1 solver, 2 configuration, 3 invariant.
int exit_code_for(ErrorKind kind);

// Applies the HSMOD_OUTPUT_DIR override to relative output paths.
std::string resolve_output_path(const std::string& path);

}  // namespace hsmod
