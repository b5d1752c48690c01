#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "chaosdesign/linalg.hpp"

namespace chaosdesign {

class Rng;

inline constexpr unsigned kMaxQubits = 64;

/// Hermitian N-qubit Pauli string in symplectic form,
///   P = i^{popcount(x & z)} X^x Z^z,
/// so every string is Hermitian and squares to the identity. Site i
/// (1-based) lives in bit i-1; site 1 is the lowest bit.
struct PauliString {
  unsigned n_qubits = 0;
  std::uint64_t x_mask = 0;
  std::uint64_t z_mask = 0;

  static PauliString identity(unsigned n_qubits) { return {n_qubits, 0, 0}; }
  /// Parses "XIZ" style text, site 1 leftmost.
  static PauliString parse(std::string_view text);

  [[nodiscard]] bool is_identity() const { return x_mask == 0 && z_mask == 0; }
  [[nodiscard]] std::size_t dim() const { return std::size_t{1} << n_qubits; }
  [[nodiscard]] std::string str() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;
};

/// Power of i carried by a phase, as an integer mod 4.
inline cplx phase_from_power(unsigned power) {
  switch (power & 3u) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

struct BasisImage {
  std::uint64_t index;
  cplx phase;
};

/// P|b> = phase |b XOR x>, phase = i^{popcount(x&z)} (-1)^{popcount(b&z)}.
BasisImage apply_to_basis_state(const PauliString& p, std::uint64_t b);

/// P * M as a row permutation with per-row phases; no dense Pauli is built.
ComplexMatrix apply_to_matrix_left(const PauliString& p, const ComplexMatrix& m);
ComplexVector apply_to_vector(const PauliString& p, const ComplexVector& v);

/// <psi|P|psi>; real up to rounding because P is Hermitian.
cplx expectation(const PauliString& p, const ComplexVector& psi);

/// Accumulates coeff * P into the dense matrix h (dim 2^N).
void add_scaled(ComplexMatrix& h, const PauliString& p, cplx coeff);

ComplexMatrix to_dense(const PauliString& p);

/// P Q = phase * R with R in canonical Hermitian form; phase in {+-1, +-i}.
std::pair<PauliString, cplx> multiply(const PauliString& p, const PauliString& q);

enum class PauliEnsembleKind { UniformFull, UniformIZ, PrefixZ, IdentityOnly };

/// Distribution of the intermediate Pauli operation.
///  - UniformFull: all 4^N strings, equiprobable.
///  - UniformIZ: the 2^N strings built from I and Z only.
///  - PrefixZ: Z on sites 1..l with l uniform in {0..N}.
///  - IdentityOnly: no Pauli operation.
struct PauliEnsemble {
  PauliEnsembleKind kind = PauliEnsembleKind::UniformFull;
  unsigned n_qubits = 0;
};

std::string_view to_string(PauliEnsembleKind kind);
/// Accepts the CLI spellings full, iz, prefix-z, none.
PauliEnsembleKind parse_ensemble_kind(std::string_view name);

PauliString sample_pauli(const PauliEnsemble& ensemble, Rng& rng);

/// Probability p0 that two independent draws coincide.
double collision_probability(const PauliEnsemble& ensemble);

/// Mask with the lowest n bits set (all bits for n >= 64).
constexpr std::uint64_t low_bits(unsigned n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

}  // namespace chaosdesign
