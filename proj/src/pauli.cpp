#include "chaosdesign/pauli.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "chaosdesign/errors.hpp"
#include "chaosdesign/rng.hpp"

namespace chaosdesign {

namespace {

unsigned parity(std::uint64_t v) { return static_cast<unsigned>(std::popcount(v)) & 1u; }

unsigned xz_power(const PauliString& p) {
  return static_cast<unsigned>(std::popcount(p.x_mask & p.z_mask));
}

void require_dim(const PauliString& p, Eigen::Index rows, const char* where) {
  if (p.n_qubits >= 63 || static_cast<std::uint64_t>(rows) != (std::uint64_t{1} << p.n_qubits)) {
    std::ostringstream msg;
    msg << where << ": operand has " << rows << " rows, Pauli string acts on " << p.n_qubits
        << " qubits";
    throw UsageError(msg.str());
  }
}

}  // namespace

PauliString PauliString::parse(std::string_view text) {
  if (text.size() > kMaxQubits) throw ValidationError("PauliString::parse: too many sites");
  PauliString p{static_cast<unsigned>(text.size()), 0, 0};
  for (std::size_t site = 0; site < text.size(); ++site) {
    const std::uint64_t bit = std::uint64_t{1} << site;
    switch (text[site]) {
      case 'I': break;
      case 'X': p.x_mask |= bit; break;
      case 'Y': p.x_mask |= bit; p.z_mask |= bit; break;
      case 'Z': p.z_mask |= bit; break;
      default:
        throw ValidationError("PauliString::parse: unexpected character '" +
                              std::string(1, text[site]) + "'");
    }
  }
  return p;
}

std::string PauliString::str() const {
  std::string out(n_qubits, 'I');
  for (unsigned site = 0; site < n_qubits; ++site) {
    const bool x = (x_mask >> site) & 1u;
    const bool z = (z_mask >> site) & 1u;
    out[site] = x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }
  return out;
}

BasisImage apply_to_basis_state(const PauliString& p, std::uint64_t b) {
  const unsigned power = xz_power(p) + 2u * parity(b & p.z_mask);
  return {b ^ p.x_mask, phase_from_power(power)};
}

ComplexMatrix apply_to_matrix_left(const PauliString& p, const ComplexMatrix& m) {
  require_dim(p, m.rows(), "apply_to_matrix_left");
  if (p.is_identity()) return m;
  ComplexMatrix out(m.rows(), m.cols());
  const unsigned base = xz_power(p);
  for (Eigen::Index b = 0; b < m.rows(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const cplx phase = phase_from_power(base + 2u * parity(ub & p.z_mask));
    out.row(static_cast<Eigen::Index>(ub ^ p.x_mask)) = phase * m.row(b);
  }
  return out;
}

ComplexVector apply_to_vector(const PauliString& p, const ComplexVector& v) {
  require_dim(p, v.size(), "apply_to_vector");
  ComplexVector out(v.size());
  const unsigned base = xz_power(p);
  for (Eigen::Index b = 0; b < v.size(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    out[static_cast<Eigen::Index>(ub ^ p.x_mask)] =
        phase_from_power(base + 2u * parity(ub & p.z_mask)) * v[b];
  }
  return out;
}

cplx expectation(const PauliString& p, const ComplexVector& psi) {
  require_dim(p, psi.size(), "expectation");
  const unsigned base = xz_power(p);
  cplx acc = 0.0;
  for (Eigen::Index b = 0; b < psi.size(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    acc += std::conj(psi[static_cast<Eigen::Index>(ub ^ p.x_mask)]) *
           phase_from_power(base + 2u * parity(ub & p.z_mask)) * psi[b];
  }
  return acc;
}

void add_scaled(ComplexMatrix& h, const PauliString& p, cplx coeff) {
  require_dim(p, h.rows(), "add_scaled");
  const unsigned base = xz_power(p);
  for (Eigen::Index b = 0; b < h.rows(); ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    h(static_cast<Eigen::Index>(ub ^ p.x_mask), b) +=
        coeff * phase_from_power(base + 2u * parity(ub & p.z_mask));
  }
}

ComplexMatrix to_dense(const PauliString& p) {
  const auto d = static_cast<Eigen::Index>(p.dim());
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  add_scaled(out, p, 1.0);
  return out;
}

std::pair<PauliString, cplx> multiply(const PauliString& p, const PauliString& q) {
  if (p.n_qubits != q.n_qubits) throw UsageError("multiply: Pauli strings differ in size");
  const PauliString r{p.n_qubits, p.x_mask ^ q.x_mask, p.z_mask ^ q.z_mask};
  // Moving Z^{z_p} past X^{x_q} costs (-1)^{popcount(z_p & x_q)}; the
  // canonical prefactors of p, q and r account for the rest.
  const unsigned power = xz_power(p) + xz_power(q) + 4u - (xz_power(r) & 3u) +
                         2u * parity(p.z_mask & q.x_mask);
  return {r, phase_from_power(power)};
}

std::string_view to_string(PauliEnsembleKind kind) {
  switch (kind) {
    case PauliEnsembleKind::UniformFull: return "full";
    case PauliEnsembleKind::UniformIZ: return "iz";
    case PauliEnsembleKind::PrefixZ: return "prefix-z";
    case PauliEnsembleKind::IdentityOnly: return "none";
  }
  return "?";
}

PauliEnsembleKind parse_ensemble_kind(std::string_view name) {
  if (name == "full") return PauliEnsembleKind::UniformFull;
  if (name == "iz") return PauliEnsembleKind::UniformIZ;
  if (name == "prefix-z") return PauliEnsembleKind::PrefixZ;
  if (name == "none") return PauliEnsembleKind::IdentityOnly;
  throw ValidationError("unknown Pauli ensemble '" + std::string(name) +
                        "' (expected full, iz, prefix-z or none)");
}

PauliString sample_pauli(const PauliEnsemble& ensemble, Rng& rng) {
  const unsigned n = ensemble.n_qubits;
  const std::uint64_t mask = low_bits(n);
  switch (ensemble.kind) {
    case PauliEnsembleKind::UniformFull: {
      const std::uint64_t x = rng.bits() & mask;
      const std::uint64_t z = rng.bits() & mask;
      return {n, x, z};
    }
    case PauliEnsembleKind::UniformIZ:
      return {n, 0, rng.bits() & mask};
    case PauliEnsembleKind::PrefixZ: {
      const auto len = static_cast<unsigned>(rng.below(std::uint64_t{n} + 1));
      return {n, 0, low_bits(len)};
    }
    case PauliEnsembleKind::IdentityOnly:
      return PauliString::identity(n);
  }
  return PauliString::identity(n);
}

double collision_probability(const PauliEnsemble& ensemble) {
  const int n = static_cast<int>(ensemble.n_qubits);
  switch (ensemble.kind) {
    case PauliEnsembleKind::UniformFull: return std::ldexp(1.0, -2 * n);
    case PauliEnsembleKind::UniformIZ: return std::ldexp(1.0, -n);
    case PauliEnsembleKind::PrefixZ: return 1.0 / (n + 1.0);
    case PauliEnsembleKind::IdentityOnly: return 1.0;
  }
  return 1.0;
}

}  // namespace chaosdesign
