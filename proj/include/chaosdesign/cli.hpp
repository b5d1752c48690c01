#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chaosdesign/analysis.hpp"

namespace chaosdesign::cli {

enum class ExitCode : int { Ok = 0, Failed = 1, ConfigError = 2, ConvergenceError = 3 };

enum class OutputFormat { Csv, Json };

/// Effective configuration of one invocation. Defaults follow the reference
/// run: N = 7, T = 1e6, M = 400, eta = 1/e, epsilon = 0.1.
struct RunConfig {
  std::string command;  ///< frame-potential, sweep-time, sweep-size, pauli-spectrum, validate
  ModelKind model = ModelKind::GUE;
  unsigned n_qubits = 7;
  double T = 1e6;
  std::size_t samples = 400;
  std::vector<int> k_list{1, 2, 3, 4};
  PauliEnsembleKind pauli = PauliEnsembleKind::UniformFull;
  std::uint64_t seed = 0;
  unsigned threads = 0;  ///< 0: CHAOSDESIGN_THREADS or hardware concurrency
  std::string output;    ///< empty: stdout
  OutputFormat format = OutputFormat::Csv;

  // sweep-time
  std::vector<double> T_grid;
  EstimatorKind estimator = EstimatorKind::Stratified;
  std::optional<double> fit_min;
  std::optional<double> fit_max;
  double epsilon = 0.1;
  std::size_t coincident_paulis = 32;
  std::size_t time_samples = 2048;
  std::string spacing = "mean";  ///< level-spacing statistic for the dE*T column: mean or median

  // sweep-size
  std::vector<unsigned> n_list{2, 3, 4, 5, 6, 7};
  double eta = 0.36787944117144233;
  std::size_t memory_budget_mb = 3072;

  // pauli-spectrum
  std::size_t spectrum_samples = 10000;

  // validate
  std::string level = "quick";
};

/// Throws ValidationError on any out-of-range or inconsistent field.
void validate(const RunConfig& cfg);

/// Parses argv (CLI flags, optionally layered over a flat key=value file
/// given by --config; flags win). Throws ValidationError on bad input.
/// Returns nullopt when --help or --version was handled.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

enum class ColumnType { Integer, Real, Text };

struct Column {
  std::string name;
  ColumnType type = ColumnType::Real;
};

/// A missing value (empty CSV cell, JSON null) is monostate.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Cell equality with NaN == NaN, so parse(emit(t)) == t can be asserted.
bool same_cell(const Cell& a, const Cell& b);
bool same_table(const Table& a, const Table& b);

/// Shortest representation that reads back to the same double.
std::string format_real(double v);

std::string emit_csv(const Table& t);
/// Column types come from `schema`; the header must match its names.
Table parse_csv(const std::string& text, const std::vector<Column>& schema);
std::string emit_json(const Table& t);
Table parse_json(const std::string& text);

std::vector<Column> frame_potential_schema();
std::vector<Column> time_sweep_schema();
std::vector<Column> size_sweep_schema();
std::vector<Column> pauli_spectrum_schema();
std::vector<Column> validation_schema();

Table frame_potential_table(const std::vector<FramePotentialRow>& rows);
Table time_sweep_table(const SweepResult& result, double level_spacing);
Table size_sweep_table(const SweepResult& result);
Table pauli_spectrum_table(const GaussianityReport& report, unsigned n_qubits);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content);

/// `<output>` without its extension, plus ".meta.json".
std::string meta_path(const std::string& output);

// ---------------------------------------------------------------------------
// Built-in checks
// ---------------------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// quick: overlap kernel against the dense oracle, purity sum rule,
/// eigensolver residual, overlap bound, exact 1-design at N = 1, all at
/// N <= 4. full adds Haar and GUE spectrum checks at N = 7.
std::vector<CheckResult> run_checks(const std::string& level, std::uint64_t seed, unsigned threads);

/// Executes cfg.command, writes the payload (stdout or atomically to
/// cfg.output) and the metadata sidecar. Maps ValidationError to 2 and
/// ConvergenceError to 3; a failed `validate` returns 1.
ExitCode run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_args + run, with CLI parse errors mapped to exit code 2.
int main_entry(int argc, const char* const* argv);

}  // namespace chaosdesign::cli
