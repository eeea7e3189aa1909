#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specext/realization.hpp"

namespace specext {

/// Configuration file is malformed or violates the schema.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct ModelSpec {
  std::vector<double> abs_a, angle_a, abs_b, angle_b;  // angles in units of pi
};

struct PointSpec {
  std::vector<double> p, q;
};

/// One CLI job. Parsed from a JSON file with strict schema validation:
/// unknown fields are rejected, and `command` (when present in the file)
/// must agree with the CLI subcommand.
struct JobConfig {
  std::string command;  // moments | solve | verify | sweep-lambda |
                        // converge-grid | entropy-curve
  std::optional<int> dimension;
  std::vector<int> grid_sizes;            // "grid"
  int nu = 2;
  std::vector<double> lambdas;            // "lambda" scalar or "lambdas" list
  std::optional<std::vector<int>> box;    // index_set.box
  std::optional<std::vector<MultiIndex>> plus;  // index_set.plus
  std::optional<ModelSpec> model;
  std::optional<std::vector<double>> c;   // data.c
  std::optional<std::vector<double>> m;   // data.m (omitted => zeros)
  std::optional<PointSpec> point;         // verify target
  SolveOptions solver;
  std::vector<int> converge_grids;        // "grids" for converge-grid
  bool section = false;
  long seed = 0;                          // recorded in outputs
  std::string out_dir = ".";
};

/// Parses and validates a config document. `command_hint` is the CLI
/// subcommand; the file's own "command" field, when present, must match.
JobConfig parse_job_config(const std::string& json_text,
                           const std::string& command_hint = {});
JobConfig load_job_config(const std::string& path,
                          const std::string& command_hint = {});

/// Exit codes of run_job.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;        // (raised as config_error instead)
inline constexpr int kExitInfeasible = 2;    // (raised as infeasible_error)
inline constexpr int kExitNotConverged = 3;  // output files still written

/// Executes the job and writes its artifact files into out_dir. Returns 0 on
/// success or 3 when a solve did not converge (files are written either way).
/// Config and feasibility problems surface as config_error / infeasible_error
/// before any file is created.
int run_job(const JobConfig& config);

}  // namespace specext
