#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "chaosdesign/linalg.hpp"

namespace chaosdesign {

class Rng;

enum class ModelKind { GUE, RandomSpin };

std::string_view to_string(ModelKind kind);
/// "gue" or "spin".
ModelKind parse_model_kind(std::string_view name);

struct HamiltonianModel {
  ModelKind kind = ModelKind::GUE;
  unsigned n_qubits = 0;
  std::uint64_t seed = 0;
};

/// GUE matrix of dimension 2^N: off-diagonal E|H_ij|^2 = 1/(2D) split evenly
/// between real and imaginary parts, real diagonal with variance 1/(2D).
/// The spectrum fills the semicircle of radius sqrt(2).
ComplexMatrix sample_gue(unsigned n_qubits, Rng& rng);

/// Couplings of the all-to-all spin model
///   H = sum_{i<j} sum_{P,P' in {X,Y,Z}} J_ij^{PP'} P_i P'_j + sum_i sum_P h_i^P P_i.
/// Index 0,1,2 = X,Y,Z; sites are 0-based here.
struct SpinCouplings {
  unsigned n_qubits = 0;
  /// pair_terms[pair_index(i, j)][3 * P + P']
  std::vector<std::array<double, 9>> pair_terms;
  /// field_terms[i][P]
  std::vector<std::array<double, 3>> field_terms;

  static SpinCouplings zeros(unsigned n_qubits);
  [[nodiscard]] std::size_t pair_index(unsigned i, unsigned j) const;
};

/// J uniform on [-1/sqrt(N), 1/sqrt(N)], h uniform on [-1, 1].
SpinCouplings sample_spin_couplings(unsigned n_qubits, Rng& rng);
ComplexMatrix assemble_spin_hamiltonian(const SpinCouplings& couplings);
ComplexMatrix build_random_spin(unsigned n_qubits, Rng& rng);

/// Draws the model's Hamiltonian from Rng(model.seed).
ComplexMatrix build_hamiltonian(const HamiltonianModel& model);

struct SpectralWidth {
  double radius;              ///< max(|E_min|, |E_max|)
  double mean_level_spacing;  ///< (E_max - E_min) / (D - 1)
};

SpectralWidth spectral_width_stats(const SpectralDecomposition& spec);

/// CDF of the Wigner semicircle supported on [-radius, radius].
double semicircle_cdf(double x, double radius = 1.4142135623730951);

/// Kolmogorov-Smirnov distance between the eigenvalue distribution and the
/// semicircle of the given radius.
double semicircle_ks_distance(const SpectralDecomposition& spec,
                              double radius = 1.4142135623730951);

}  // namespace chaosdesign
