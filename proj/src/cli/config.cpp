#include <CLI11.hpp>

#include <cmath>
#include <ostream>

#include "chaosdesign/cli.hpp"
#include "chaosdesign/errors.hpp"

namespace chaosdesign::cli {

namespace {

const char* const kCommands[] = {"frame-potential", "sweep-time", "sweep-size", "pauli-spectrum",
                                 "validate"};

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

void validate(const RunConfig& cfg) {
  bool known = false;
  for (const char* c : kCommands) known = known || cfg.command == c;
  require(known, "unknown command '" + cfg.command + "'");
  require(cfg.n_qubits >= 1 && cfg.n_qubits <= 12, "--n must be in [1, 12]");
  require(cfg.model != ModelKind::RandomSpin || cfg.n_qubits >= 2 || cfg.command == "sweep-size",
          "the spin model needs --n >= 2");
  require(cfg.T > 0.0 && std::isfinite(cfg.T), "--T must be positive");
  require(cfg.samples >= 2, "--samples must be >= 2");
  require(!cfg.k_list.empty(), "--k must list at least one order");
  for (int k : cfg.k_list) require(k >= 1 && k <= 40, "every k must be in [1, 40]");
  require(cfg.epsilon > 0.0, "--epsilon must be positive");
  require(cfg.eta > 0.0 && cfg.eta <= 1.0, "--eta must be in (0, 1]");
  require(cfg.coincident_paulis >= 2 && cfg.time_samples >= 1,
          "--coincident-paulis must be >= 2 and --time-samples >= 1");
  require(cfg.spacing == "mean" || cfg.spacing == "median", "--spacing must be mean or median");
  require(cfg.level == "quick" || cfg.level == "full", "--level must be quick or full");
  require(cfg.memory_budget_mb >= 1, "--memory-budget-mb must be positive");
  require(cfg.spectrum_samples >= 100, "pauli-spectrum needs at least 100 samples");
  if (cfg.fit_min && cfg.fit_max) require(*cfg.fit_min < *cfg.fit_max, "--fit-min must be below --fit-max");

  if (cfg.command == "sweep-time") {
    require(!cfg.T_grid.empty(), "sweep-time needs --T-grid");
    for (std::size_t i = 0; i < cfg.T_grid.size(); ++i) {
      require(cfg.T_grid[i] > 0.0 && std::isfinite(cfg.T_grid[i]), "--T-grid values must be positive");
      require(i == 0 || cfg.T_grid[i] > cfg.T_grid[i - 1], "--T-grid must be strictly increasing");
    }
  }
  if (cfg.command == "sweep-size") {
    require(!cfg.n_list.empty(), "--n-list must not be empty");
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
      require(cfg.n_list[i] >= 1 && cfg.n_list[i] <= 12, "--n-list values must be in [1, 12]");
      require(i == 0 || cfg.n_list[i] > cfg.n_list[i - 1], "--n-list must be strictly increasing");
    }
    for (int k : cfg.k_list) require(k >= 2, "sweep-size needs every k >= 2");
  }
  if (cfg.command == "pauli-spectrum")
    require(cfg.pauli != PauliEnsembleKind::IdentityOnly, "pauli-spectrum needs a non-trivial --pauli");
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  RunConfig cfg;
  CLI::App app{"Frame potentials of Hamiltonian-twirled temporal ensembles", "chaosdesign"};
  app.set_version_flag("--version", std::string(CHAOSDESIGN_VERSION));
  app.set_config("--config", "", "flat key=value file; keys are the long flag names");
  app.require_subcommand(1);

  std::string model = "gue";
  std::string pauli = "full";
  std::string format = "csv";
  std::string estimator = "stratified";
  double fit_min = 0.0;
  double fit_max = 0.0;

  app.add_option("--model", model, "gue or spin")->capture_default_str();
  app.add_option("--n", cfg.n_qubits, "number of qubits N")->capture_default_str();
  app.add_option("--T", cfg.T, "maximal evolution time")->capture_default_str();
  app.add_option("--samples", cfg.samples, "ensemble size M (pauli-spectrum: number of values)")
      ->capture_default_str();
  app.add_option("--k", cfg.k_list, "comma-separated frame-potential orders")->delimiter(',');
  app.add_option("--pauli", pauli, "full, iz, prefix-z or none")->capture_default_str();
  app.add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  app.add_option("--threads", cfg.threads, "worker threads (0: CHAOSDESIGN_THREADS or all cores)");
  app.add_option("--output", cfg.output, "output file (default stdout)");
  app.add_option("--format", format, "csv or json")->capture_default_str();
  app.add_option("--T-grid", cfg.T_grid, "comma-separated increasing T values")->delimiter(',');
  app.add_option("--estimator", estimator, "pairwise or stratified")->capture_default_str();
  app.add_option("--fit-min", fit_min, "lower end of the slope fit window");
  app.add_option("--fit-max", fit_max, "upper end of the slope fit window");
  app.add_option("--epsilon", cfg.epsilon, "delta_F threshold for the crossing")->capture_default_str();
  app.add_option("--coincident-paulis", cfg.coincident_paulis)->capture_default_str();
  app.add_option("--time-samples", cfg.time_samples)->capture_default_str();
  app.add_option("--spacing", cfg.spacing, "level spacing for the dE_T column: mean or median")
      ->capture_default_str();
  app.add_option("--n-list", cfg.n_list, "comma-separated increasing qubit counts")->delimiter(',');
  app.add_option("--eta", cfg.eta, "tolerance in the critical-size condition")->capture_default_str();
  app.add_option("--memory-budget-mb", cfg.memory_budget_mb)->capture_default_str();
  app.add_option("--level", cfg.level, "validate: quick or full")->capture_default_str();

  for (const char* name : kCommands) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::CallForVersion&) {
    out << CHAOSDESIGN_VERSION << '\n';
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ValidationError(e.what());
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.model = parse_model_kind(model);
  cfg.pauli = parse_ensemble_kind(pauli);
  if (format == "csv") {
    cfg.format = OutputFormat::Csv;
  } else if (format == "json") {
    cfg.format = OutputFormat::Json;
  } else {
    throw ValidationError("--format must be csv or json");
  }
  cfg.estimator = parse_estimator_kind(estimator);
  if (app.count("--fit-min") > 0) cfg.fit_min = fit_min;
  if (app.count("--fit-max") > 0) cfg.fit_max = fit_max;
  if (cfg.command == "pauli-spectrum" && app.count("--samples") > 0) cfg.spectrum_samples = cfg.samples;
  validate(cfg);
  return cfg;
}

}  // namespace chaosdesign::cli
