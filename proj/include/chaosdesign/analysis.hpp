#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chaosdesign/hamiltonian.hpp"
#include "chaosdesign/protocol.hpp"

namespace chaosdesign {

// ---------------------------------------------------------------------------
// Pauli spectrum
// ---------------------------------------------------------------------------

struct PauliSpectrumSample {
  std::vector<double> values;
  unsigned n_qubits = 0;
  PauliEnsemble ensemble;
};

/// n values c = <eps_a|P|eps_a> with P drawn from `ensemble` (identity draws
/// are rejected) and a uniform over eigenstates. Throws UsageError if the
/// ensemble only contains the identity or an imaginary part exceeds 1e-10.
PauliSpectrumSample pauli_spectrum_samples(const SpectralDecomposition& spec,
                                           const PauliEnsemble& ensemble, std::size_t n, Rng& rng);

/// Sum over all 4^N strings of <psi|P|psi>^2; equals 2^N for a unit vector.
double pauli_purity_sum(const ComplexVector& psi, unsigned n_qubits);

struct GaussianityReport {
  double mean = 0.0;
  double variance = 0.0;         ///< unbiased
  double excess_kurtosis = 0.0;  ///< bias-corrected G2
  double ks_to_gaussian = 0.0;   ///< against N(0, 1/(D+1))
  double expected_variance = 0.0;
  std::size_t n = 0;
};

GaussianityReport gaussianity_report(const PauliSpectrumSample& sample);

// ---------------------------------------------------------------------------
// Frame-potential experiments
// ---------------------------------------------------------------------------

/// One k of a frame-potential run, with the closed-form comparison.
struct FramePotentialRow {
  FramePotentialEstimate estimate;
  double haar = 0.0;  ///< k!
  double delta = 0.0;
  double delta_error = 0.0;
  double prediction = 0.0;
  double p0 = 0.0;
};

FramePotentialRow make_row(const FramePotentialEstimate& estimate, double p0);

/// Seeds derived from one master seed.
struct SeedSchedule {
  std::uint64_t h1 = 0;
  std::uint64_t h2 = 0;
  std::uint64_t elements = 0;
  std::uint64_t coincident = 0;

  static SeedSchedule from_master(std::uint64_t master);
};

struct FramePotentialExperiment {
  ModelKind model = ModelKind::GUE;
  unsigned n_qubits = 7;
  ProtocolConfig protocol;
  unsigned threads = 1;
};

struct FramePotentialRun {
  SeedSchedule seeds;
  std::vector<FramePotentialRow> rows;
};

/// Samples H1, H2 from the model, M elements, and estimates every k with the
/// pair estimator.
FramePotentialRun run_frame_potential(const FramePotentialExperiment& exp);

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

enum class EstimatorKind { Pairwise, Stratified };
std::string_view to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(std::string_view name);

struct SweepPoint {
  double T = 0.0;
  unsigned n_qubits = 0;
  FramePotentialRow row;
  std::optional<std::uint64_t> critical_size;  ///< size sweeps only
  std::string status = "ok";
};

struct SlopeFit {
  int k = 0;
  std::optional<double> crossing_T;  ///< where delta_F falls below epsilon for good
  double fit_min = 0.0;
  double fit_max = 0.0;
  std::size_t n_points = 0;
  double slope = 0.0;        ///< NaN with fewer than two points
  double slope_error = 0.0;  ///< OLS standard error; NaN with fewer than three points
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<SlopeFit> fits;  ///< time sweeps only, one per k
};

struct TimeSweepConfig {
  /// k_list, n_samples, pauli_ensemble and seed are used; T is replaced by
  /// each grid value.
  ProtocolConfig base;
  std::vector<double> T_grid;
  EstimatorKind estimator = EstimatorKind::Stratified;
  StratifiedOptions stratified;
  double epsilon = 0.1;
  /// Explicit fit window. Without one, the fit uses the points at or past the
  /// crossing whose delta_F is resolved (>= 3 standard errors).
  std::optional<double> fit_min;
  std::optional<double> fit_max;
  unsigned threads = 1;
};

/// Estimates delta_F at every T with fresh element seeds
/// (split_seed(seed, "T=<value>")), Hamiltonians held fixed.
SweepResult sweep_time(const TimeSweepConfig& cfg, const HamiltonianPair& pair);

/// Crossing and log-log slope for one k over already computed points.
SlopeFit fit_time_sweep(const std::vector<SweepPoint>& points, int k, double epsilon,
                        std::optional<double> fit_min, std::optional<double> fit_max);

/// Ordinary least squares of y on x: (slope, slope standard error).
std::pair<double, double> least_squares_slope(const std::vector<double>& x,
                                              const std::vector<double>& y);

struct SizeSweepConfig {
  std::vector<int> k_list{2, 3, 4};
  std::vector<unsigned> n_list{2, 3, 4, 5, 6, 7};
  PauliEnsembleKind ensemble = PauliEnsembleKind::UniformFull;
  ModelKind model = ModelKind::GUE;
  double T = 1e6;
  std::size_t n_samples = 400;
  std::uint64_t seed = 0;
  double eta = 0.36787944117144233;  // 1/e
  std::size_t memory_budget_bytes = std::size_t{3} << 30;
  unsigned threads = 1;
};

/// Rough peak memory of one size-sweep cell.
std::size_t size_sweep_cell_bytes(unsigned n_qubits, std::size_t n_samples);

/// One pair estimate per N with fresh Hamiltonians (seeds from
/// split_seed(seed, "N=<n>")) shared by every k; cells over the memory budget
/// are reported with a skip status.
SweepResult sweep_system_size(const SizeSweepConfig& cfg);

}  // namespace chaosdesign
