#include <algorithm>
#include <cmath>
#include <sstream>

#include "chaosdesign/cli.hpp"
#include "chaosdesign/errors.hpp"
#include "chaosdesign/rng.hpp"

namespace chaosdesign::cli {

namespace {

std::string sci(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

HamiltonianPair pair_for(ModelKind model, unsigned n, std::uint64_t master) {
  const auto seeds = SeedSchedule::from_master(master);
  return prepare_pair(HamiltonianModel{model, n, seeds.h1}, HamiltonianModel{model, n, seeds.h2});
}

std::vector<ModelKind> models_at(unsigned n) {
  if (n < 2) return {ModelKind::GUE};
  return {ModelKind::GUE, ModelKind::RandomSpin};
}

std::string label(ModelKind m, unsigned n) {
  return std::string(to_string(m)) + " N=" + std::to_string(n);
}

void quick_checks(std::vector<CheckResult>& out, std::uint64_t seed, unsigned threads) {
  for (unsigned n = 2; n <= 4; ++n) {
    for (ModelKind model : models_at(n)) {
      const std::string tag = label(model, n);
      const std::uint64_t master = split_seed(seed, "check " + tag);
      const HamiltonianPair pair = pair_for(model, n, master);

      const double residual = std::max(relative_residual(pair.h1, pair.first),
                                       relative_residual(pair.h2, pair.second));
      out.push_back({"eigen residual " + tag, residual <= 1e-10, "max " + sci(residual)});

      ProtocolConfig cfg;
      cfg.T = 50.0;
      cfg.n_samples = 101;
      cfg.pauli_ensemble = PauliEnsemble{PauliEnsembleKind::UniformFull, n};
      Rng rng(split_seed(master, "elements"));
      const auto elements = sample_ensemble(cfg, pair, rng, threads);

      double oracle_err = 0.0;
      double symmetry_err = 0.0;
      for (std::size_t p = 0; p < 50; ++p) {
        const auto& e = elements[2 * p];
        const auto& f = elements[2 * p + 1];
        const cplx fast = pair_overlap(e, f, pair.first.eigenvalues, pair.second.eigenvalues);
        const cplx slow = direct_overlap_oracle(e, f, pair.h1, pair.h2);
        oracle_err = std::max(oracle_err, std::abs(fast - slow) / std::max(1.0, std::abs(slow)));
        const cplx back = pair_overlap(f, e, pair.first.eigenvalues, pair.second.eigenvalues);
        symmetry_err =
            std::max(symmetry_err, std::abs(fast - std::conj(back)) / std::max(1.0, std::abs(fast)));
      }
      out.push_back({"overlap oracle " + tag, oracle_err <= 1e-8, "max rel " + sci(oracle_err)});
      out.push_back({"overlap symmetry " + tag, symmetry_err <= 1e-12, "max rel " + sci(symmetry_err)});

      const OverlapTable table =
          overlap_table(elements, pair.first.eigenvalues, pair.second.eigenvalues, threads);
      const double bound = static_cast<double>(pair.dim()) * (1.0 + 1e-9);
      double worst = 0.0;
      for (std::size_t m = 0; m < table.size; ++m)
        for (std::size_t k = 0; k < table.size; ++k) worst = std::max(worst, std::sqrt(table.at(m, k)));
      out.push_back({"overlap bound " + tag, worst <= bound,
                     "max |tr| " + sci(worst) + " vs D " + std::to_string(pair.dim())});
    }
  }

  for (unsigned n = 1; n <= 4; ++n) {
    for (ModelKind model : models_at(n)) {
      const std::string tag = label(model, n);
      const HamiltonianPair pair = pair_for(model, n, split_seed(seed, "purity " + tag));
      const double target = std::ldexp(1.0, static_cast<int>(n));
      double err = 0.0;
      for (Eigen::Index a = 0; a < pair.second.eigenvectors.cols(); ++a)
        err = std::max(err, std::abs(pauli_purity_sum(pair.second.eigenvectors.col(a), n) - target));
      out.push_back({"purity sum " + tag, err <= 1e-9, "max abs err " + sci(err)});
    }
  }

  // Pauli twirl of a fixed pair of evolutions: the finite ensemble over all
  // 4^N strings and a few time pairs is an exact 1-design.
  for (unsigned n = 1; n <= 2; ++n) {
    const HamiltonianPair pair = pair_for(ModelKind::GUE, n, split_seed(seed, "one-design"));
    std::vector<ComplexMatrix> members;
    const double times[][2] = {{0.3, 1.7}, {2.9, 0.4}, {11.0, 5.5}};
    const std::uint64_t strings = std::uint64_t{1} << n;
    for (const auto& t : times) {
      for (std::uint64_t x = 0; x < strings; ++x) {
        for (std::uint64_t z = 0; z < strings; ++z) {
          SampledElement e = build_element(ElementDraw{t[0], t[1], PauliString{n, x, z}}, pair.first,
                                           pair.second);
          members.push_back(evolution_operator(e, pair.first, pair.second));
        }
      }
    }
    const double f1 = exact_frame_potential(members, 1);
    out.push_back({"exact 1-design N=" + std::to_string(n), std::abs(f1 - 1.0) <= 1e-12,
                   "F1 - 1 = " + sci(f1 - 1.0)});
  }
}

void full_checks(std::vector<CheckResult>& out, std::uint64_t seed, unsigned threads) {
  {
    Rng rng(split_seed(seed, "haar"));
    std::vector<ComplexMatrix> unitaries;
    for (int m = 0; m < 200; ++m) unitaries.push_back(sample_haar_unitary(64, rng));
    const std::vector<int> ks{1, 2, 3};
    const auto est = estimate_from_table(overlap_table(unitaries, threads), ks);
    for (const auto& e : est) {
      const double kf = factorial(e.k);
      out.push_back({"haar baseline D=64 k=" + std::to_string(e.k),
                     std::abs(e.mean - kf) <= 3.0 * e.std_error,
                     "F " + sci(e.mean) + " +- " + sci(e.std_error)});
    }
  }
  {
    Rng rng(split_seed(seed, "gue"));
    int good = 0;
    for (int draw = 0; draw < 20; ++draw) {
      const auto spec = hermitian_eigendecompose(sample_gue(7, rng));
      const double ks = semicircle_ks_distance(spec);
      const double radius = spectral_width_stats(spec).radius;
      if (ks <= 0.1 && radius >= 1.2 && radius <= 1.6) ++good;
    }
    out.push_back({"gue semicircle N=7", good >= 19, std::to_string(good) + "/20 draws in band"});
  }
  {
    const HamiltonianPair pair = pair_for(ModelKind::GUE, 7, split_seed(seed, "spectrum"));
    Rng rng(split_seed(seed, "paulis"));
    const auto sample =
        pauli_spectrum_samples(pair.first, PauliEnsemble{PauliEnsembleKind::UniformFull, 7}, 10000, rng);
    const auto r = gaussianity_report(sample);
    const double se = std::sqrt(r.variance / static_cast<double>(r.n));
    const bool ok = std::abs(r.mean) <= 3.0 * se &&
                    std::abs(r.variance - r.expected_variance) <= 0.1 * r.expected_variance;
    out.push_back({"pauli spectrum N=7", ok, "mean " + sci(r.mean) + ", variance " + sci(r.variance)});
  }
}

}  // namespace

std::vector<CheckResult> run_checks(const std::string& level, std::uint64_t seed, unsigned threads) {
  if (level != "quick" && level != "full") throw ValidationError("level must be quick or full");
  std::vector<CheckResult> out;
  quick_checks(out, seed, threads);
  if (level == "full") full_checks(out, seed, threads);
  return out;
}

}  // namespace chaosdesign::cli
