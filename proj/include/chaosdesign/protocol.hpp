#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "chaosdesign/hamiltonian.hpp"
#include "chaosdesign/linalg.hpp"
#include "chaosdesign/pauli.hpp"

namespace chaosdesign {

class Rng;

// ---------------------------------------------------------------------------
// Ensemble sampling
// ---------------------------------------------------------------------------

/// Temporal ensemble U = exp(-i H2 t2) P exp(-i H1 t1) with t1, t2 uniform on
/// [0, T] and P drawn from `pauli_ensemble`.
struct ProtocolConfig {
  double T = 1e6;
  std::size_t n_samples = 400;
  std::vector<int> k_list{1, 2, 3, 4};
  PauliEnsemble pauli_ensemble{};
  std::uint64_t seed = 0;
};

/// Throws ValidationError unless T > 0, M >= 2 and every k >= 1.
void validate(const ProtocolConfig& cfg);

/// Fixed (H1, H2) with their spectral decompositions, shared read-only by all
/// ensemble elements built against it.
struct HamiltonianPair {
  ComplexMatrix h1;
  ComplexMatrix h2;
  SpectralDecomposition first;
  SpectralDecomposition second;
  std::uint64_t provenance = 0;

  [[nodiscard]] std::size_t dim() const { return first.dim(); }
};

/// Hash of both spectra; elements carry it so overlaps between runs with
/// different Hamiltonians are rejected.
std::uint64_t provenance_tag(const SpectralDecomposition& first,
                             const SpectralDecomposition& second);

HamiltonianPair prepare_pair(ComplexMatrix h1, ComplexMatrix h2);
HamiltonianPair prepare_pair(const HamiltonianModel& first, const HamiltonianModel& second);

struct ElementDraw {
  double t1 = 0.0;
  double t2 = 0.0;
  PauliString pauli;
};

/// One ensemble member together with its transition matrix
/// C = W2^dagger P W1, i.e. C_ai = <eps_a|P|E_i>.
struct SampledElement {
  double t1 = 0.0;
  double t2 = 0.0;
  PauliString pauli;
  ComplexMatrix transition;
  std::uint64_t provenance = 0;
};

/// Draws t1, t2 (in that order) and then the Pauli string.
ElementDraw draw_element(const ProtocolConfig& cfg, Rng& rng);

SampledElement build_element(const ElementDraw& draw, const SpectralDecomposition& first,
                             const SpectralDecomposition& second);

SampledElement sample_element(const ProtocolConfig& cfg, const SpectralDecomposition& first,
                              const SpectralDecomposition& second, Rng& rng);

/// M = cfg.n_samples elements. Draws are sequential on `rng`; the O(D^3)
/// transition matrices are built in parallel.
std::vector<SampledElement> sample_ensemble(const ProtocolConfig& cfg, const HamiltonianPair& pair,
                                            Rng& rng, unsigned threads = 1);

/// Dense U = exp(-i H2 t2) P exp(-i H1 t1) from the decompositions.
ComplexMatrix evolution_operator(const SampledElement& e, const SpectralDecomposition& first,
                                 const SpectralDecomposition& second);

// ---------------------------------------------------------------------------
// Overlaps
// ---------------------------------------------------------------------------

/// tr[V^dagger U] for U = e, V = f via the eigenbasis expansion
///   sum_{a,i} exp(-i dt1 E_i - i dt2 eps_a) C^e_ai conj(C^f_ai),
/// O(D^2). Throws UsageError when the elements come from different
/// Hamiltonian pairs or dimensions disagree.
cplx pair_overlap(const SampledElement& e, const SampledElement& f, const RealVector& first_energies,
                  const RealVector& second_energies);

/// Independent O(D^3) reference: re-diagonalizes H1 and H2, builds U and V
/// as dense products with an explicit Pauli matrix, returns tr(V^dagger U).
cplx direct_overlap_oracle(const SampledElement& e, const SampledElement& f, const ComplexMatrix& h1,
                           const ComplexMatrix& h2);

/// Symmetric M x M table of |tr[V^dagger U]|^2. The diagonal holds the
/// self-overlaps (D^2) and is ignored by the pair estimators.
struct OverlapTable {
  std::size_t size = 0;
  std::size_t dim = 0;
  std::vector<double> abs2;

  [[nodiscard]] double at(std::size_t m, std::size_t n) const { return abs2[m * size + n]; }
};

/// One pass over all element pairs. Work is split into fixed 32 x 32 tiles
/// evaluated as small matrix products; tiles do not depend on `threads`,
/// so the table is bit-identical for any worker count.
OverlapTable overlap_table(const std::vector<SampledElement>& elements,
                           const RealVector& first_energies, const RealVector& second_energies,
                           unsigned threads = 1);

/// Same for explicit unitaries (Haar baselines, finite groups).
OverlapTable overlap_table(std::span<const ComplexMatrix> unitaries, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Frame potentials
// ---------------------------------------------------------------------------

struct FramePotentialEstimate {
  int k = 0;
  double mean = 0.0;
  /// Leave-one-element-out jackknife error; NaN when it is undefined (M = 2).
  double std_error = 0.0;
  /// Ordered pairs that entered the mean.
  std::size_t n_pairs = 0;
  /// log(mean); the only finite value when mean overflows a double.
  double log_mean = 0.0;
  /// |tr|^{2k} was accumulated in rescaled form to avoid overflow.
  bool log_space = false;
};

/// Optional filter on unordered pairs (m < n); excluded pairs do not count.
using PairFilter = std::function<bool(std::size_t, std::size_t)>;

/// mean = average of |tr|^{2k} over ordered pairs m != n; error bars by
/// jackknife over elements. Throws UsageError if M < 2 or k < 1.
std::vector<FramePotentialEstimate> estimate_from_table(const OverlapTable& table,
                                                        std::span<const int> k_list,
                                                        const PairFilter& include = {});

std::vector<FramePotentialEstimate> estimate_frame_potentials(
    const std::vector<SampledElement>& elements, const RealVector& first_energies,
    const RealVector& second_energies, std::span<const int> k_list, unsigned threads = 1);

/// Frame potential of a finite ensemble under its own uniform measure,
/// self-pairs included: (1/|S|^2) sum_{U,V in S} |tr V^dagger U|^{2k}.
double exact_frame_potential(std::span<const ComplexMatrix> members, int k);

// ---------------------------------------------------------------------------
// Stratified estimator
// ---------------------------------------------------------------------------

/// Splits the frame potential on whether the two Pauli draws coincide,
///   F = p0 F_same + (1 - p0) F_diff.
/// F_diff comes from the pair estimator restricted to pairs with different
/// Paulis. F_same only depends on the time differences, which are
/// triangular on [-T, T]; it is integrated by importance sampling with a
/// proposal that mixes the triangular law with a truncated Cauchy of scale
/// `proposal_scale / spectral width`, so the narrow peak near zero time
/// difference is resolved at any T.
struct StratifiedOptions {
  std::size_t coincident_paulis = 32;
  std::size_t time_samples = 2048;
  double proposal_scale = 4.0;
};

struct StratifiedEstimate {
  double p0 = 0.0;
  std::vector<FramePotentialEstimate> combined;
  std::vector<FramePotentialEstimate> coincident;
  std::vector<FramePotentialEstimate> distinct;
};

StratifiedEstimate estimate_frame_potentials_stratified(const ProtocolConfig& cfg,
                                                        const HamiltonianPair& pair,
                                                        Rng& element_rng, Rng& coincidence_rng,
                                                        const StratifiedOptions& options = {},
                                                        unsigned threads = 1);

// ---------------------------------------------------------------------------
// Closed-form predictions
// ---------------------------------------------------------------------------

double factorial(int k);

/// Frame potential of the protocol without Pauli operation: 6 for k = 2,
/// the asymptotic e (k!)^2 for k >= 3. Throws UsageError for k < 2.
double f_2sp(int k);

struct TheoryPrediction {
  int k = 0;
  double p0 = 0.0;
  double f_2sp = 0.0;  ///< NaN for k = 1
  double predicted = 0.0;
  bool approximate = false;  ///< f_2sp is the large-k asymptotic form
};

/// 1 for k = 1; p0 f_2sp(k) + (1 - p0) k! otherwise.
TheoryPrediction predict_frame_potential(int k, double p0);

/// |F - k!| / k!
double normalized_deviation(int k, double frame_potential);

/// Smallest N >= 1 with p0(N) <= eta k! / f_2sp(k); nullopt if no N works.
std::optional<std::uint64_t> critical_system_size(int k, double eta, PauliEnsembleKind kind);

}  // namespace chaosdesign
