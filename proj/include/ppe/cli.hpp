#pragma once

// Command implementations behind the `ppe` executable.

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "ppe/aps.hpp"

namespace ppe::cli {

enum class Output { report_json, trace_csv, svg };

struct RunSpec {
  std::filesystem::path game_path;
  SolverConfig config;
  std::set<Output> outputs{Output::report_json};
  std::filesystem::path out_dir = ".";
  bool include_timing = false;
  bool enforce_size_caps = true;
};

struct SweepSpec {
  RunSpec run;
  std::vector<double> delta_values;
};

// Parses "report_json,trace_csv,svg"; throws std::invalid_argument.
std::set<Output> parse_outputs(const std::string& list);

// Parses a comma list of decimals or ratios; throws std::invalid_argument.
std::vector<double> parse_delta_grid(const std::string& list);

// Exit codes: 0 converged, 1 input error, 2 stopped without convergence.
int cmd_solve(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepSpec& spec, std::ostream& out, std::ostream& err);

// Reads PPE_THREADS; 0 when unset or unreadable.
unsigned threads_from_env();

}  // namespace ppe::cli
