#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>

#include "chaosdesign/cli.hpp"
#include "chaosdesign/errors.hpp"
#include "chaosdesign/parallel.hpp"
#include "chaosdesign/rng.hpp"

namespace chaosdesign::cli {

namespace {

using nlohmann::json;

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(format_real(v)); }

json config_json(const RunConfig& cfg, unsigned threads) {
  json c;
  c["command"] = cfg.command;
  c["model"] = to_string(cfg.model);
  c["n"] = cfg.n_qubits;
  c["T"] = cfg.T;
  c["samples"] = cfg.samples;
  c["k"] = cfg.k_list;
  c["pauli"] = to_string(cfg.pauli);
  c["seed"] = cfg.seed;
  c["threads"] = threads;
  c["output"] = cfg.output;
  c["format"] = cfg.format == OutputFormat::Csv ? "csv" : "json";
  if (cfg.command == "sweep-time") {
    c["T_grid"] = cfg.T_grid;
    c["estimator"] = to_string(cfg.estimator);
    c["fit_min"] = cfg.fit_min ? json(*cfg.fit_min) : json(nullptr);
    c["fit_max"] = cfg.fit_max ? json(*cfg.fit_max) : json(nullptr);
    c["epsilon"] = cfg.epsilon;
    c["coincident_paulis"] = cfg.coincident_paulis;
    c["time_samples"] = cfg.time_samples;
    c["spacing"] = cfg.spacing;
  }
  if (cfg.command == "sweep-size") {
    c["n_list"] = cfg.n_list;
    c["eta"] = cfg.eta;
    c["memory_budget_mb"] = cfg.memory_budget_mb;
  }
  if (cfg.command == "pauli-spectrum") c["spectrum_samples"] = cfg.spectrum_samples;
  if (cfg.command == "validate") c["level"] = cfg.level;
  return c;
}

json seeds_json(const SeedSchedule& s) {
  return {{"H1", s.h1}, {"H2", s.h2}, {"elements", s.elements}, {"paulis", s.coincident}};
}

double median_level_spacing(const SpectralDecomposition& spec) {
  const auto d = spec.eigenvalues.size();
  if (d < 2) throw UsageError("level spacing needs D >= 2");
  // Bulk statistic: median gap over the central half of the spectrum.
  const Eigen::Index lo = d / 4;
  const Eigen::Index hi = std::max<Eigen::Index>(lo + 1, d - d / 4 - 1);
  std::vector<double> gaps;
  for (Eigen::Index i = lo; i < hi; ++i) gaps.push_back(spec.eigenvalues[i + 1] - spec.eigenvalues[i]);
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  return gaps[gaps.size() / 2];
}

struct Payload {
  Table table;
  json extra = json::object();
};

Payload frame_potential(const RunConfig& cfg, unsigned threads) {
  FramePotentialExperiment exp;
  exp.model = cfg.model;
  exp.n_qubits = cfg.n_qubits;
  exp.protocol.T = cfg.T;
  exp.protocol.n_samples = cfg.samples;
  exp.protocol.k_list = cfg.k_list;
  exp.protocol.pauli_ensemble = PauliEnsemble{cfg.pauli, cfg.n_qubits};
  exp.protocol.seed = cfg.seed;
  exp.threads = threads;
  const FramePotentialRun run = run_frame_potential(exp);
  Payload p{frame_potential_table(run.rows)};
  p.extra["seeds"] = seeds_json(run.seeds);
  return p;
}

Payload sweep_time_cmd(const RunConfig& cfg, unsigned threads) {
  const SeedSchedule seeds = SeedSchedule::from_master(cfg.seed);
  const HamiltonianPair pair = prepare_pair(HamiltonianModel{cfg.model, cfg.n_qubits, seeds.h1},
                                            HamiltonianModel{cfg.model, cfg.n_qubits, seeds.h2});
  TimeSweepConfig sweep;
  sweep.base.n_samples = cfg.samples;
  sweep.base.k_list = cfg.k_list;
  sweep.base.pauli_ensemble = PauliEnsemble{cfg.pauli, cfg.n_qubits};
  sweep.base.seed = cfg.seed;
  sweep.T_grid = cfg.T_grid;
  sweep.estimator = cfg.estimator;
  sweep.stratified.coincident_paulis = cfg.coincident_paulis;
  sweep.stratified.time_samples = cfg.time_samples;
  sweep.epsilon = cfg.epsilon;
  sweep.fit_min = cfg.fit_min;
  sweep.fit_max = cfg.fit_max;
  sweep.threads = threads;
  const SweepResult result = sweep_time(sweep, pair);

  const double spacing = cfg.spacing == "mean" ? spectral_width_stats(pair.first).mean_level_spacing
                                               : median_level_spacing(pair.first);
  Payload p{time_sweep_table(result, spacing)};
  p.extra["seeds"] = seeds_json(seeds);
  p.extra["level_spacing"] = {{"statistic", cfg.spacing}, {"value", spacing}};
  json fits = json::array();
  for (const auto& f : result.fits) {
    fits.push_back({{"k", f.k},
                    {"crossing_T", f.crossing_T ? json(*f.crossing_T) : json(nullptr)},
                    {"fit_min", real_or_null(f.fit_min)},
                    {"fit_max", real_or_null(f.fit_max)},
                    {"n_points", f.n_points},
                    {"slope", real_or_null(f.slope)},
                    {"slope_stderr", real_or_null(f.slope_error)}});
  }
  p.extra["fits"] = fits;
  return p;
}

Payload sweep_size_cmd(const RunConfig& cfg, unsigned threads) {
  SizeSweepConfig sweep;
  sweep.k_list = cfg.k_list;
  sweep.n_list = cfg.n_list;
  sweep.ensemble = cfg.pauli;
  sweep.model = cfg.model;
  sweep.T = cfg.T;
  sweep.n_samples = cfg.samples;
  sweep.seed = cfg.seed;
  sweep.eta = cfg.eta;
  sweep.memory_budget_bytes = cfg.memory_budget_mb << 20;
  sweep.threads = threads;
  Payload p{size_sweep_table(sweep_system_size(sweep))};
  json per_n = json::object();
  for (unsigned n : cfg.n_list)
    per_n["N=" + std::to_string(n)] =
        seeds_json(SeedSchedule::from_master(split_seed(cfg.seed, "N=" + std::to_string(n))));
  p.extra["seeds"] = per_n;
  return p;
}

Payload pauli_spectrum_cmd(const RunConfig& cfg) {
  const SeedSchedule seeds = SeedSchedule::from_master(cfg.seed);
  const auto spec =
      hermitian_eigendecompose(build_hamiltonian(HamiltonianModel{cfg.model, cfg.n_qubits, seeds.h1}));
  Rng rng(seeds.coincident);
  const auto sample = pauli_spectrum_samples(spec, PauliEnsemble{cfg.pauli, cfg.n_qubits},
                                             cfg.spectrum_samples, rng);
  Payload p{pauli_spectrum_table(gaussianity_report(sample), cfg.n_qubits)};
  p.extra["seeds"] = seeds_json(seeds);
  return p;
}

Payload validate_cmd(const RunConfig& cfg, unsigned threads, std::ostream& err, bool& all_passed) {
  Payload p;
  p.table.columns = validation_schema();
  all_passed = true;
  for (const auto& c : run_checks(cfg.level, cfg.seed, threads)) {
    err << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    p.table.rows.push_back({c.name, std::string(c.passed ? "pass" : "fail"), c.detail});
    all_passed = all_passed && c.passed;
  }
  return p;
}

}  // namespace

ExitCode run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    validate(cfg);
    const unsigned threads = cfg.threads > 0 ? cfg.threads : default_thread_count();
    bool passed = true;
    Payload payload;
    if (cfg.command == "frame-potential") {
      payload = frame_potential(cfg, threads);
    } else if (cfg.command == "sweep-time") {
      payload = sweep_time_cmd(cfg, threads);
    } else if (cfg.command == "sweep-size") {
      payload = sweep_size_cmd(cfg, threads);
    } else if (cfg.command == "pauli-spectrum") {
      payload = pauli_spectrum_cmd(cfg);
    } else {
      payload = validate_cmd(cfg, threads, err, passed);
    }

    const std::string body =
        cfg.format == OutputFormat::Csv ? emit_csv(payload.table) : emit_json(payload.table);
    json meta;
    meta["version"] = CHAOSDESIGN_VERSION;
    meta["config"] = config_json(cfg, threads);
    for (const auto& [key, value] : payload.extra.items()) meta[key] = value;
    meta["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (cfg.output.empty()) {
      out << body;
      err << meta.dump(2) << '\n';
    } else {
      write_atomic(cfg.output, body);
      write_atomic(meta_path(cfg.output), meta.dump(2) + '\n');
    }
    return passed ? ExitCode::Ok : ExitCode::Failed;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return ExitCode::ConfigError;
  } catch (const ConvergenceError& e) {
    err << "numerical error: " << e.what() << '\n';
    return ExitCode::ConvergenceError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCode::Failed;
  }
}

int main_entry(int argc, const char* const* argv) {
  std::optional<RunConfig> cfg;
  try {
    cfg = parse_args(argc, argv, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::ConfigError);
  }
  if (!cfg) return 0;
  return static_cast<int>(run(*cfg, std::cout, std::cerr));
}

}  // namespace chaosdesign::cli
