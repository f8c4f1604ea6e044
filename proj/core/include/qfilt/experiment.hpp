#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qfilt/amplify.hpp"
#include "qfilt/hamiltonians.hpp"
#include "qfilt/layout.hpp"
#include "qfilt/thermal.hpp"

namespace qfilt {

enum class OutputFormat { csv, jsonl };

// "csv" or "jsonl"; anything else is a ValidationError.
OutputFormat parse_output_format(const std::string& name);

// One emitted line.  Absent optionals serialize as empty CSV cells / JSON
// nulls; every number except the seed uses 12 significant digits.  Each
// experiment reuses the fixed columns for its own observables; the
// README's column table is the authoritative mapping.
struct ResultRow {
  std::string experiment;
  std::uint64_t seed = 0;
  std::optional<double> mu;
  std::optional<double> eps;
  std::optional<int> k;
  std::optional<int> eta;
  std::optional<double> q;
  std::optional<long> iterations;
  std::optional<int> retries;
  std::optional<bool> aborted;
  std::optional<double> energy_out;
  std::optional<double> energy_exact_nearest;
  std::optional<double> wall_time_ms;
  bool success = true;  // feeds the exit code; never serialized
};

// The exact CSV column line.
extern const char kResultHeader[];

// 12-significant-digit decimal form, identical in CSV and JSON output.
std::string format_number(double value);

std::string format_row(const ResultRow& row, OutputFormat format);

// Everything run_experiment needs; produced by load_config and then
// possibly adjusted by CLI flag overrides.
struct ExperimentConfig {
  std::string kind;  // filter | sweep | naive | jordan | qma | thermal | bounds
  std::vector<std::uint64_t> seeds = {1};
  std::uint64_t seed_offset = 0;
  std::string out;  // result path; empty = stdout
  OutputFormat format = OutputFormat::csv;
  int workers = 1;
  double margin = 0.125;
  int qubit_cap = kDefaultQubitCap;

  bool has_model = false;
  ModelSpec model;

  // filter / sweep / qma / thermal window
  double mu = 0.5;
  double eps = 0.25;
  int max_retries = 8;
  double overlap_noise = 0.0;

  // naive
  double energy_cutoff = 0.5;  // normalized spectrum units
  int phase_bits = 4;

  // jordan
  int dimension = 16;
  int rank_q = 0;  // 0 = drawn per seed
  int rank_r = 0;

  // qma
  std::string fixture = "rotation";  // identity | rotation; ignored with a file
  double theta = 0.24;
  std::string verifier_file;
  int witness_qubits = 2;  // identity-fixture shape
  int scratch_qubits = 1;
  int recordings = 0;  // 0 = derive k from (mu, eps)

  // thermal
  double temperature = 0.3;
  int bins = 17;
  int dos_seeds = 8;
  int max_resamples = 32;
  bool positive_exponent = false;
  bool sample_from_estimate = false;

  // bounds
  int phase_bits_min = 2;
  int phase_bits_max = 8;
  std::size_t grid_points = 14286;  // per k value
};

// Parses and validates the JSON config document.  The file's "experiment"
// field may be omitted when `fallback_kind` (the CLI subcommand) supplies
// it; when both are present they must agree.  Errors carry the config path
// and, for parse failures, the line and column.
ExperimentConfig load_config(const std::string& path, const std::string& fallback_kind = "");

// Runs the configured experiment over a worker pool, streaming rows to
// `out` in a deterministic (mu, seed) order regardless of completion
// order.  Returns the process exit code: 0 when at least one run
// succeeded, 2 when every run aborted or no rows were produced.  Errors
// keep propagating as exceptions (the CLI turns them into exit code 1).
int run_experiment(const ExperimentConfig& config, std::ostream& out);

// Same, writing to config.out (or stdout when empty).
int run_experiment(const ExperimentConfig& config);

}  // namespace qfilt
