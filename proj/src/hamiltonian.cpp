#include "chaosdesign/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "chaosdesign/errors.hpp"
#include "chaosdesign/pauli.hpp"
#include "chaosdesign/rng.hpp"

namespace chaosdesign {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::GUE ? "gue" : "spin";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "gue") return ModelKind::GUE;
  if (name == "spin") return ModelKind::RandomSpin;
  throw ValidationError("unknown model '" + std::string(name) + "' (expected gue or spin)");
}

ComplexMatrix sample_gue(unsigned n_qubits, Rng& rng) {
  if (n_qubits < 1 || n_qubits > 24) throw ValidationError("sample_gue: need 1 <= N <= 24");
  const auto d = Eigen::Index{1} << n_qubits;
  const double diag_sd = std::sqrt(1.0 / (2.0 * static_cast<double>(d)));
  const double part_sd = std::sqrt(1.0 / (4.0 * static_cast<double>(d)));
  ComplexMatrix h(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    h(i, i) = cplx(diag_sd * rng.normal(), 0.0);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double re = part_sd * rng.normal();
      const double im = part_sd * rng.normal();
      h(i, j) = cplx(re, im);
      h(j, i) = cplx(re, -im);
    }
  }
  return h;
}

SpinCouplings SpinCouplings::zeros(unsigned n_qubits) {
  SpinCouplings c;
  c.n_qubits = n_qubits;
  const std::size_t n = n_qubits;
  c.pair_terms.assign(n * (n - 1) / 2, {});
  c.field_terms.assign(n, {});
  return c;
}

std::size_t SpinCouplings::pair_index(unsigned i, unsigned j) const {
  if (!(i < j && j < n_qubits)) throw UsageError("SpinCouplings::pair_index: need i < j < N");
  // Row-major enumeration of the strict upper triangle.
  const std::size_t n = n_qubits;
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

SpinCouplings sample_spin_couplings(unsigned n_qubits, Rng& rng) {
  if (n_qubits < 2 || n_qubits > 24) throw ValidationError("build_random_spin: need 2 <= N <= 24");
  SpinCouplings c = SpinCouplings::zeros(n_qubits);
  const double j_scale = 1.0 / std::sqrt(static_cast<double>(n_qubits));
  for (unsigned i = 0; i < n_qubits; ++i)
    for (unsigned j = i + 1; j < n_qubits; ++j)
      for (double& term : c.pair_terms[c.pair_index(i, j)]) term = rng.uniform(-j_scale, j_scale);
  for (auto& site : c.field_terms)
    for (double& term : site) term = rng.uniform(-1.0, 1.0);
  return c;
}

namespace {

// Single-site Pauli in canonical form: X -> (x), Y -> (x, z), Z -> (z).
PauliString site_pauli(unsigned n_qubits, unsigned site, int which) {
  const std::uint64_t bit = std::uint64_t{1} << site;
  switch (which) {
    case 0: return {n_qubits, bit, 0};
    case 1: return {n_qubits, bit, bit};
    default: return {n_qubits, 0, bit};
  }
}

}  // namespace

ComplexMatrix assemble_spin_hamiltonian(const SpinCouplings& c) {
  const unsigned n = c.n_qubits;
  const auto d = Eigen::Index{1} << n;
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (unsigned i = 0; i < n; ++i) {
    for (unsigned j = i + 1; j < n; ++j) {
      const auto& terms = c.pair_terms[c.pair_index(i, j)];
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
          const double coeff = terms[static_cast<std::size_t>(3 * a + b)];
          if (coeff == 0.0) continue;
          // Different sites commute, so the product is again canonical.
          const PauliString pa = site_pauli(n, i, a);
          const PauliString pb = site_pauli(n, j, b);
          const PauliString prod{n, pa.x_mask | pb.x_mask, pa.z_mask | pb.z_mask};
          add_scaled(h, prod, coeff);
        }
      }
    }
    for (int a = 0; a < 3; ++a) {
      const double coeff = c.field_terms[i][static_cast<std::size_t>(a)];
      if (coeff != 0.0) add_scaled(h, site_pauli(n, i, a), coeff);
    }
  }
  return h;
}

ComplexMatrix build_random_spin(unsigned n_qubits, Rng& rng) {
  return assemble_spin_hamiltonian(sample_spin_couplings(n_qubits, rng));
}

ComplexMatrix build_hamiltonian(const HamiltonianModel& model) {
  Rng rng(model.seed);
  return model.kind == ModelKind::GUE ? sample_gue(model.n_qubits, rng)
                                      : build_random_spin(model.n_qubits, rng);
}

SpectralWidth spectral_width_stats(const SpectralDecomposition& spec) {
  const auto d = spec.eigenvalues.size();
  if (d < 2) throw UsageError("spectral_width_stats: need D >= 2");
  const double lo = spec.eigenvalues[0];
  const double hi = spec.eigenvalues[d - 1];
  return {std::max(std::abs(lo), std::abs(hi)), (hi - lo) / static_cast<double>(d - 1)};
}

double semicircle_cdf(double x, double radius) {
  if (x <= -radius) return 0.0;
  if (x >= radius) return 1.0;
  const double r2 = radius * radius;
  return 0.5 + x * std::sqrt(r2 - x * x) / (std::numbers::pi * r2) +
         std::asin(x / radius) / std::numbers::pi;
}

double semicircle_ks_distance(const SpectralDecomposition& spec, double radius) {
  std::vector<double> ev(spec.eigenvalues.data(), spec.eigenvalues.data() + spec.eigenvalues.size());
  std::sort(ev.begin(), ev.end());
  const double n = static_cast<double>(ev.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const double f = semicircle_cdf(ev[i], radius);
    worst = std::max({worst, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return worst;
}

}  // namespace chaosdesign
