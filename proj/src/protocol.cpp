#include "chaosdesign/protocol.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include "chaosdesign/errors.hpp"
#include "chaosdesign/parallel.hpp"
#include "chaosdesign/rng.hpp"

namespace chaosdesign {

void validate(const ProtocolConfig& cfg) {
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) throw ValidationError("T must be positive and finite");
  if (cfg.n_samples < 2) throw ValidationError("need at least 2 samples");
  if (cfg.k_list.empty()) throw ValidationError("k list is empty");
  for (int k : cfg.k_list)
    if (k < 1) throw ValidationError("every k must be >= 1");
  if (cfg.pauli_ensemble.n_qubits < 1 || cfg.pauli_ensemble.n_qubits > kMaxQubits)
    throw ValidationError("Pauli ensemble qubit count out of range");
}

std::uint64_t provenance_tag(const SpectralDecomposition& first,
                             const SpectralDecomposition& second) {
  std::uint64_t h = fnv1a64("chaosdesign-pair");
  auto mix = [&h](const RealVector& v) {
    h = splitmix64(h ^ static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
      h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v[i]));
  };
  mix(first.eigenvalues);
  mix(second.eigenvalues);
  return h;
}

HamiltonianPair prepare_pair(ComplexMatrix h1, ComplexMatrix h2) {
  if (h1.rows() != h2.rows()) throw UsageError("prepare_pair: Hamiltonians differ in dimension");
  HamiltonianPair pair;
  pair.first = hermitian_eigendecompose(h1);
  pair.second = hermitian_eigendecompose(h2);
  pair.h1 = std::move(h1);
  pair.h2 = std::move(h2);
  pair.provenance = provenance_tag(pair.first, pair.second);
  return pair;
}

HamiltonianPair prepare_pair(const HamiltonianModel& first, const HamiltonianModel& second) {
  return prepare_pair(build_hamiltonian(first), build_hamiltonian(second));
}

ElementDraw draw_element(const ProtocolConfig& cfg, Rng& rng) {
  ElementDraw d;
  d.t1 = rng.uniform(0.0, cfg.T);
  d.t2 = rng.uniform(0.0, cfg.T);
  d.pauli = sample_pauli(cfg.pauli_ensemble, rng);
  return d;
}

SampledElement build_element(const ElementDraw& draw, const SpectralDecomposition& first,
                             const SpectralDecomposition& second) {
  if (first.dim() != second.dim() || first.dim() != draw.pauli.dim())
    throw UsageError("build_element: decompositions and Pauli string disagree in dimension");
  SampledElement e;
  e.t1 = draw.t1;
  e.t2 = draw.t2;
  e.pauli = draw.pauli;
  e.transition.noalias() =
      second.eigenvectors.adjoint() * apply_to_matrix_left(draw.pauli, first.eigenvectors);
  e.provenance = provenance_tag(first, second);
  return e;
}

SampledElement sample_element(const ProtocolConfig& cfg, const SpectralDecomposition& first,
                              const SpectralDecomposition& second, Rng& rng) {
  return build_element(draw_element(cfg, rng), first, second);
}

std::vector<SampledElement> sample_ensemble(const ProtocolConfig& cfg, const HamiltonianPair& pair,
                                            Rng& rng, unsigned threads) {
  validate(cfg);
  if (cfg.pauli_ensemble.n_qubits >= 63 || pair.dim() != (std::size_t{1} << cfg.pauli_ensemble.n_qubits))
    throw UsageError("sample_ensemble: Pauli ensemble size does not match the Hamiltonians");
  std::vector<ElementDraw> draws;
  draws.reserve(cfg.n_samples);
  for (std::size_t m = 0; m < cfg.n_samples; ++m) draws.push_back(draw_element(cfg, rng));

  std::vector<SampledElement> elements(cfg.n_samples);
  parallel_for(cfg.n_samples, threads, [&](std::size_t m) {
    elements[m] = build_element(draws[m], pair.first, pair.second);
  });
  return elements;
}

namespace {

ComplexVector phases(const RealVector& energies, double t) {
  ComplexVector out(energies.size());
  for (Eigen::Index i = 0; i < energies.size(); ++i) out[i] = std::polar(1.0, -t * energies[i]);
  return out;
}

}  // namespace

ComplexMatrix evolution_operator(const SampledElement& e, const SpectralDecomposition& first,
                                 const SpectralDecomposition& second) {
  const ComplexMatrix u1 = spectral_function(first, [&](double x) { return std::polar(1.0, -e.t1 * x); });
  const ComplexMatrix u2 = spectral_function(second, [&](double x) { return std::polar(1.0, -e.t2 * x); });
  return u2 * apply_to_matrix_left(e.pauli, u1);
}

cplx pair_overlap(const SampledElement& e, const SampledElement& f, const RealVector& first_energies,
                  const RealVector& second_energies) {
  if (e.provenance != f.provenance)
    throw UsageError("pair_overlap: elements were built against different Hamiltonian pairs");
  const Eigen::Index d = e.transition.rows();
  if (f.transition.rows() != d || first_energies.size() != d || second_energies.size() != d)
    throw UsageError("pair_overlap: dimension mismatch");

  const ComplexVector alpha = phases(first_energies, e.t1 - f.t1);
  const ComplexVector beta = phases(second_energies, e.t2 - f.t2);
  cplx total = 0.0;
  for (Eigen::Index a = 0; a < d; ++a) {
    const cplx* ce = e.transition.row(a).data();
    const cplx* cf = f.transition.row(a).data();
    cplx row = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) row += alpha[i] * ce[i] * std::conj(cf[i]);
    total += beta[a] * row;
  }
  return total;
}

cplx direct_overlap_oracle(const SampledElement& e, const SampledElement& f, const ComplexMatrix& h1,
                           const ComplexMatrix& h2) {
  if (h1.rows() != h2.rows() || static_cast<std::size_t>(h1.rows()) != e.pauli.dim() ||
      e.pauli.dim() != f.pauli.dim())
    throw UsageError("direct_overlap_oracle: dimension mismatch");
  const SpectralDecomposition s1 = hermitian_eigendecompose(h1);
  const SpectralDecomposition s2 = hermitian_eigendecompose(h2);
  auto dense_unitary = [&](const SampledElement& x) -> ComplexMatrix {
    const ComplexMatrix u1 = spectral_function(s1, [&](double v) { return std::polar(1.0, -x.t1 * v); });
    const ComplexMatrix u2 = spectral_function(s2, [&](double v) { return std::polar(1.0, -x.t2 * v); });
    return matmul(u2, matmul(to_dense(x.pauli), u1));
  };
  const ComplexMatrix u = dense_unitary(e);
  const ComplexMatrix v = dense_unitary(f);
  return trace(matmul(adjoint(v), u));
}

}  // namespace chaosdesign
