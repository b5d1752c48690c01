#include "chaosdesign/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "chaosdesign/errors.hpp"
#include "chaosdesign/rng.hpp"

namespace chaosdesign {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double normal_cdf(double x, double sigma) {
  return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Pauli spectrum
// ---------------------------------------------------------------------------

PauliSpectrumSample pauli_spectrum_samples(const SpectralDecomposition& spec,
                                           const PauliEnsemble& ensemble, std::size_t n, Rng& rng) {
  if (n < 1) throw UsageError("pauli_spectrum_samples: n must be >= 1");
  if (ensemble.kind == PauliEnsembleKind::IdentityOnly)
    throw UsageError("pauli_spectrum_samples: ensemble contains only the identity");
  if (spec.dim() != (std::size_t{1} << ensemble.n_qubits))
    throw UsageError("pauli_spectrum_samples: ensemble size does not match the spectrum");

  PauliSpectrumSample out;
  out.n_qubits = ensemble.n_qubits;
  out.ensemble = ensemble;
  out.values.reserve(n);
  while (out.values.size() < n) {
    const PauliString p = sample_pauli(ensemble, rng);
    if (p.is_identity()) continue;
    const auto a = static_cast<Eigen::Index>(rng.below(spec.dim()));
    const cplx c = expectation(p, spec.eigenvectors.col(a));
    if (std::abs(c.imag()) > 1e-10)
      throw UsageError("pauli_spectrum_samples: expectation value is not real");
    out.values.push_back(c.real());
  }
  return out;
}

double pauli_purity_sum(const ComplexVector& psi, unsigned n_qubits) {
  if (n_qubits > 10) throw UsageError("pauli_purity_sum: exhaustive sum limited to 10 qubits");
  const std::uint64_t count = std::uint64_t{1} << n_qubits;
  double total = 0.0;
  for (std::uint64_t x = 0; x < count; ++x)
    for (std::uint64_t z = 0; z < count; ++z)
      total += std::norm(expectation(PauliString{n_qubits, x, z}, psi));
  return total;
}

GaussianityReport gaussianity_report(const PauliSpectrumSample& sample) {
  const auto& v = sample.values;
  if (v.size() < 4) throw UsageError("gaussianity_report: need at least 4 values");
  GaussianityReport r;
  r.n = v.size();
  const double n = static_cast<double>(r.n);
  for (double x : v) r.mean += x;
  r.mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : v) {
    const double d2 = (x - r.mean) * (x - r.mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  r.variance = m2 / (n - 1.0);
  m2 /= n;
  m4 /= n;
  const double g2 = m4 / (m2 * m2) - 3.0;
  r.excess_kurtosis = m2 > 0.0 ? ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0)) : kNaN;

  const double dim = std::ldexp(1.0, static_cast<int>(sample.n_qubits));
  r.expected_variance = 1.0 / (dim + 1.0);
  const double sigma = std::sqrt(r.expected_variance);
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal_cdf(sorted[i], sigma);
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / n),
                   std::abs(static_cast<double>(i + 1) / n - f)});
  }
  r.ks_to_gaussian = ks;
  return r;
}

// ---------------------------------------------------------------------------
// Frame-potential experiments
// ---------------------------------------------------------------------------

FramePotentialRow make_row(const FramePotentialEstimate& estimate, double p0) {
  FramePotentialRow row;
  row.estimate = estimate;
  row.haar = factorial(estimate.k);
  row.delta = normalized_deviation(estimate.k, estimate.mean);
  row.delta_error = estimate.std_error / row.haar;
  row.prediction = predict_frame_potential(estimate.k, p0).predicted;
  row.p0 = p0;
  return row;
}

SeedSchedule SeedSchedule::from_master(std::uint64_t master) {
  return {split_seed(master, "H1"), split_seed(master, "H2"), split_seed(master, "elements"),
          split_seed(master, "paulis")};
}

FramePotentialRun run_frame_potential(const FramePotentialExperiment& exp) {
  ProtocolConfig cfg = exp.protocol;
  cfg.pauli_ensemble.n_qubits = exp.n_qubits;
  validate(cfg);
  FramePotentialRun run;
  run.seeds = SeedSchedule::from_master(cfg.seed);
  const HamiltonianPair pair = prepare_pair(HamiltonianModel{exp.model, exp.n_qubits, run.seeds.h1},
                                            HamiltonianModel{exp.model, exp.n_qubits, run.seeds.h2});
  Rng rng(run.seeds.elements);
  const auto elements = sample_ensemble(cfg, pair, rng, exp.threads);
  const auto estimates = estimate_frame_potentials(elements, pair.first.eigenvalues,
                                                   pair.second.eigenvalues, cfg.k_list, exp.threads);
  const double p0 = collision_probability(cfg.pauli_ensemble);
  for (const auto& e : estimates) run.rows.push_back(make_row(e, p0));
  return run;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

std::string_view to_string(EstimatorKind kind) {
  return kind == EstimatorKind::Pairwise ? "pairwise" : "stratified";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  if (name == "pairwise") return EstimatorKind::Pairwise;
  if (name == "stratified") return EstimatorKind::Stratified;
  throw ValidationError("unknown estimator '" + std::string(name) + "' (pairwise, stratified)");
}

std::pair<double, double> least_squares_slope(const std::vector<double>& x,
                                              const std::vector<double>& y) {
  if (x.size() != y.size()) throw UsageError("least_squares_slope: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) return {kNaN, kNaN};
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) return {kNaN, kNaN};
  const double slope = sxy / sxx;
  if (n < 3) return {slope, kNaN};
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - my - slope * (x[i] - mx);
    rss += r * r;
  }
  return {slope, std::sqrt(rss / static_cast<double>(n - 2) / sxx)};
}

SlopeFit fit_time_sweep(const std::vector<SweepPoint>& points, int k, double epsilon,
                        std::optional<double> fit_min, std::optional<double> fit_max) {
  std::vector<const SweepPoint*> rows;
  for (const auto& p : points)
    if (p.row.estimate.k == k && p.status == "ok" && std::isfinite(p.row.delta)) rows.push_back(&p);
  SlopeFit fit;
  fit.k = k;
  fit.slope = fit.slope_error = kNaN;

  // First grid point from which delta_F stays at or below epsilon.
  std::size_t first_below = rows.size();
  while (first_below > 0 && rows[first_below - 1]->row.delta <= epsilon) --first_below;
  if (first_below < rows.size()) {
    if (first_below == 0) {
      fit.crossing_T = rows[0]->T;
    } else {
      const auto& a = *rows[first_below - 1];
      const auto& b = *rows[first_below];
      const double la = std::log(a.row.delta);
      const double lb = std::log(std::max(b.row.delta, std::numeric_limits<double>::min()));
      const double s = (std::log(epsilon) - la) / (lb - la);
      fit.crossing_T = std::exp(std::log(a.T) + s * (std::log(b.T) - std::log(a.T)));
    }
  }

  const bool explicit_window = fit_min.has_value() || fit_max.has_value();
  fit.fit_min = fit_min.value_or(explicit_window ? 0.0 : fit.crossing_T.value_or(kNaN));
  fit.fit_max = fit_max.value_or(std::numeric_limits<double>::infinity());
  if (!explicit_window && !fit.crossing_T) return fit;

  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto* p : rows) {
    if (p->T < fit.fit_min || p->T > fit.fit_max || !(p->row.delta > 0.0)) continue;
    if (!explicit_window && !(p->row.delta >= 3.0 * p->row.delta_error)) continue;
    lx.push_back(std::log(p->T));
    ly.push_back(std::log(p->row.delta));
  }
  fit.n_points = lx.size();
  std::tie(fit.slope, fit.slope_error) = least_squares_slope(lx, ly);
  return fit;
}

SweepResult sweep_time(const TimeSweepConfig& cfg, const HamiltonianPair& pair) {
  if (cfg.T_grid.empty()) throw ValidationError("sweep_time: empty T grid");
  for (std::size_t i = 0; i < cfg.T_grid.size(); ++i) {
    if (!(cfg.T_grid[i] > 0.0) || !std::isfinite(cfg.T_grid[i]))
      throw ValidationError("sweep_time: T values must be positive and finite");
    if (i > 0 && !(cfg.T_grid[i] > cfg.T_grid[i - 1]))
      throw ValidationError("sweep_time: T grid must be strictly increasing");
  }
  if (!(cfg.epsilon > 0.0)) throw ValidationError("sweep_time: epsilon must be positive");

  SweepResult result;
  for (double T : cfg.T_grid) {
    ProtocolConfig cell = cfg.base;
    cell.T = T;
    validate(cell);
    const std::uint64_t cell_seed = split_seed(cfg.base.seed, "T=" + shortest(T));
    const SeedSchedule seeds = SeedSchedule::from_master(cell_seed);
    const double p0 = collision_probability(cell.pauli_ensemble);
    Rng element_rng(seeds.elements);
    std::vector<FramePotentialEstimate> estimates;
    if (cfg.estimator == EstimatorKind::Stratified) {
      Rng coincidence_rng(seeds.coincident);
      estimates = estimate_frame_potentials_stratified(cell, pair, element_rng, coincidence_rng,
                                                       cfg.stratified, cfg.threads)
                      .combined;
    } else {
      const auto elements = sample_ensemble(cell, pair, element_rng, cfg.threads);
      estimates = estimate_frame_potentials(elements, pair.first.eigenvalues,
                                            pair.second.eigenvalues, cell.k_list, cfg.threads);
    }
    for (const auto& e : estimates) {
      SweepPoint p;
      p.T = T;
      p.n_qubits = cell.pauli_ensemble.n_qubits;
      p.row = make_row(e, p0);
      if (!std::isfinite(e.mean)) p.status = "undefined";
      result.points.push_back(std::move(p));
    }
  }
  for (int k : cfg.base.k_list)
    result.fits.push_back(fit_time_sweep(result.points, k, cfg.epsilon, cfg.fit_min, cfg.fit_max));
  return result;
}

std::size_t size_sweep_cell_bytes(unsigned n_qubits, std::size_t n_samples) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  const std::size_t matrix = dim * dim * sizeof(cplx);
  // Transition matrices, two Hamiltonians with eigenvectors, two 32-row
  // tiles, and the pair table.
  return n_samples * matrix + 4 * matrix + 2 * 32 * matrix + n_samples * n_samples * sizeof(double);
}

SweepResult sweep_system_size(const SizeSweepConfig& cfg) {
  if (cfg.k_list.empty() || cfg.n_list.empty()) throw ValidationError("sweep_system_size: empty range");
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] < 1) throw ValidationError("sweep_system_size: N must be >= 1");
    if (i > 0 && !(cfg.n_list[i] > cfg.n_list[i - 1]))
      throw ValidationError("sweep_system_size: N list must be strictly increasing");
  }
  for (int k : cfg.k_list)
    if (k < 2) throw ValidationError("sweep_system_size: every k must be >= 2");

  SweepResult result;
  for (unsigned n : cfg.n_list) {
    ProtocolConfig cell;
    cell.T = cfg.T;
    cell.n_samples = cfg.n_samples;
    cell.k_list = cfg.k_list;
    cell.pauli_ensemble = PauliEnsemble{cfg.ensemble, n};
    cell.seed = split_seed(cfg.seed, "N=" + std::to_string(n));
    validate(cell);
    const double p0 = collision_probability(cell.pauli_ensemble);

    auto push = [&](const FramePotentialEstimate& e, std::string status) {
      SweepPoint p;
      p.T = cfg.T;
      p.n_qubits = n;
      p.row = make_row(e, p0);
      p.critical_size = critical_system_size(e.k, cfg.eta, cfg.ensemble);
      p.status = std::move(status);
      result.points.push_back(std::move(p));
    };

    const std::size_t need = size_sweep_cell_bytes(n, cfg.n_samples);
    const bool model_ok = cfg.model == ModelKind::GUE ? n <= 24 : n >= 2;
    if (need > cfg.memory_budget_bytes || !model_ok) {
      const std::string reason =
          !model_ok ? "skipped: model undefined at this N"
                    : "skipped: needs " + std::to_string(need >> 20) + " MiB, budget " +
                          std::to_string(cfg.memory_budget_bytes >> 20) + " MiB";
      for (int k : cfg.k_list) {
        FramePotentialEstimate e;
        e.k = k;
        e.mean = e.std_error = e.log_mean = kNaN;
        push(e, reason);
      }
      continue;
    }

    const SeedSchedule seeds = SeedSchedule::from_master(cell.seed);
    const HamiltonianPair pair = prepare_pair(HamiltonianModel{cfg.model, n, seeds.h1},
                                              HamiltonianModel{cfg.model, n, seeds.h2});
    Rng rng(seeds.elements);
    const auto elements = sample_ensemble(cell, pair, rng, cfg.threads);
    const auto estimates = estimate_frame_potentials(elements, pair.first.eigenvalues,
                                                     pair.second.eigenvalues, cell.k_list, cfg.threads);
    for (const auto& e : estimates) push(e, std::isfinite(e.mean) ? "ok" : "undefined");
  }
  return result;
}

}  // namespace chaosdesign
