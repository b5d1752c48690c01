// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Optional arguments select criteria by number.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chaosdesign/analysis.hpp"
#include "chaosdesign/cli.hpp"
#include "chaosdesign/parallel.hpp"
#include "chaosdesign/rng.hpp"

using namespace chaosdesign;

namespace {

constexpr std::uint64_t kSeed = 7;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string pm(double mean, double err) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.6g +- %.3g", mean, err);
  return buf;
}

unsigned threads() { return default_thread_count(); }

FramePotentialRun reference_run(ModelKind model, PauliEnsembleKind kind, std::vector<int> ks,
                                double T = 1e6, unsigned n = 7) {
  FramePotentialExperiment exp;
  exp.model = model;
  exp.n_qubits = n;
  exp.protocol.T = T;
  exp.protocol.n_samples = 400;
  exp.protocol.k_list = std::move(ks);
  exp.protocol.pauli_ensemble = PauliEnsemble{kind, n};
  exp.protocol.seed = kSeed;
  exp.threads = threads();
  return run_frame_potential(exp);
}

HamiltonianPair reference_pair(ModelKind model, unsigned n, std::uint64_t master) {
  const auto s = SeedSchedule::from_master(master);
  return prepare_pair(HamiltonianModel{model, n, s.h1}, HamiltonianModel{model, n, s.h2});
}

bool within(const FramePotentialEstimate& e, double target) {
  return std::abs(e.mean - target) <= 3.0 * e.std_error;
}

Outcome c1_no_pauli() {
  const auto run = reference_run(ModelKind::GUE, PauliEnsembleKind::IdentityOnly, {2});
  const auto& e = run.rows[0].estimate;
  return {within(e, 6.0), "F2 = " + pm(e.mean, e.std_error) + ", target 6"};
}

Outcome c2_full_protocol() {
  const auto run = reference_run(ModelKind::GUE, PauliEnsembleKind::UniformFull, {2});
  const auto& r = run.rows[0];
  return {within(r.estimate, r.prediction),
          "F2 = " + pm(r.estimate.mean, r.estimate.std_error) + ", target " + fmt("%.7g", r.prediction)};
}

Outcome c3_design_emergence() {
  bool ok = true;
  std::string detail;
  for (ModelKind model : {ModelKind::GUE, ModelKind::RandomSpin}) {
    const auto run = reference_run(model, PauliEnsembleKind::UniformFull, {1, 2, 3, 4});
    detail += std::string(to_string(model)) + " dF =";
    for (const auto& r : run.rows) {
      ok = ok && r.delta <= 0.1;
      detail += fmt(" %.3g", r.delta);
    }
    detail += "; ";
  }
  return {ok, detail + "threshold 0.1"};
}

Outcome c4_one_design() {
  bool ok = true;
  std::string detail;
  for (double T : {1.0, 100.0, 1e6}) {
    const auto run = reference_run(ModelKind::GUE, PauliEnsembleKind::UniformFull, {1}, T);
    const auto& e = run.rows[0].estimate;
    ok = ok && within(e, 1.0);
    detail += "T=" + fmt("%g", T) + ": F1 = " + pm(e.mean, e.std_error) + "; ";
  }

  // Finite ensemble: every Pauli string at N = 1 twirling fixed evolutions,
  // evaluated over the full product measure.
  const auto pair = reference_pair(ModelKind::GUE, 1, kSeed);
  std::vector<ComplexMatrix> members;
  for (const auto& t : std::vector<std::pair<double, double>>{{0.0, 0.0}, {0.7, 2.3}, {40.0, 13.0}})
    for (std::uint64_t x = 0; x < 2; ++x)
      for (std::uint64_t z = 0; z < 2; ++z) {
        const auto e = build_element(ElementDraw{t.first, t.second, PauliString{1, x, z}}, pair.first,
                                     pair.second);
        members.push_back(evolution_operator(e, pair.first, pair.second));
      }
  const double exact = exact_frame_potential(members, 1);
  ok = ok && std::abs(exact - 1.0) <= 1e-12;
  return {ok, detail + "finite group N=1: F1 - 1 = " + fmt("%.2e", exact - 1.0)};
}

Outcome c5_pauli_spectrum() {
  const auto pair = reference_pair(ModelKind::GUE, 7, kSeed);
  Rng rng(SeedSchedule::from_master(kSeed).coincident);
  const auto sample =
      pauli_spectrum_samples(pair.first, PauliEnsemble{PauliEnsembleKind::UniformFull, 7}, 10000, rng);
  const auto r = gaussianity_report(sample);
  const double se = std::sqrt(r.variance / static_cast<double>(r.n));
  const bool ok = std::abs(r.mean) <= 3.0 * se && std::abs(r.variance - 1.0 / 129) <= 0.1 / 129;
  return {ok, "mean " + fmt("%.3g", r.mean) + " (3 se " + fmt("%.3g", 3 * se) + "), variance " +
                  fmt("%.5g", r.variance) + " vs 1/129 = " + fmt("%.5g", 1.0 / 129)};
}

Outcome c6_finite_time() {
  struct Case {
    ModelKind model;
    double scale;
    std::vector<double> grid;
  };
  const Case cases[] = {
      {ModelKind::GUE, 128.0, {32, 55, 94, 161, 276, 473, 811, 1390, 2383, 4096}},
      {ModelKind::RandomSpin, 128.0 / 7.0, {4, 7, 12, 20, 34, 58, 100, 170, 290, 500}},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto pair = reference_pair(c.model, 7, kSeed);
    TimeSweepConfig cfg;
    cfg.base.n_samples = 1200;
    cfg.base.k_list = {2};
    cfg.base.pauli_ensemble = PauliEnsemble{PauliEnsembleKind::UniformFull, 7};
    cfg.base.seed = kSeed;
    cfg.T_grid = c.grid;
    cfg.estimator = EstimatorKind::Stratified;
    cfg.threads = threads();
    const auto result = sweep_time(cfg, pair);
    const auto& fit = result.fits.at(0);
    const double cross = fit.crossing_T.value_or(NAN);
    const bool cross_ok = std::isfinite(cross) && cross >= c.scale / 4 && cross <= c.scale * 4;
    const bool slope_ok = std::abs(fit.slope + 2.0) <= 0.5;
    ok = ok && cross_ok && slope_ok;
    detail += std::string(to_string(c.model)) + ": T_c " + fmt("%.4g", cross) + " (band " +
              fmt("%.4g", c.scale / 4) + ".." + fmt("%.4g", c.scale * 4) + "), slope " +
              fmt("%.3g", fit.slope) + " over " + std::to_string(fit.n_points) + " points; ";
  }
  return {ok, detail};
}

Outcome c7_finite_size() {
  const double eta = std::exp(-1.0);
  const auto nc = critical_system_size(3, eta, PauliEnsembleKind::UniformIZ);
  if (!nc) return {false, "no critical size"};
  SizeSweepConfig cfg;
  cfg.k_list = {3};
  cfg.n_list.clear();
  for (unsigned n = 2; n + 2 <= *nc; ++n) cfg.n_list.push_back(n);
  for (unsigned n = static_cast<unsigned>(*nc) + 2; n <= 9; ++n) cfg.n_list.push_back(n);
  cfg.ensemble = PauliEnsembleKind::UniformIZ;
  cfg.T = 1e6;
  cfg.n_samples = 400;
  cfg.seed = kSeed;
  cfg.eta = eta;
  cfg.memory_budget_bytes = std::size_t{4} << 30;
  cfg.threads = threads();
  const auto result = sweep_system_size(cfg);
  bool ok = true;
  std::string detail = "N_c = " + std::to_string(*nc) + ";";
  for (const auto& p : result.points) {
    const bool below = p.n_qubits + 2 <= *nc;
    const bool cell_ok = p.status == "ok" && (below ? p.row.delta >= 0.5 : p.row.delta <= 0.1);
    ok = ok && cell_ok;
    detail += " N=" + std::to_string(p.n_qubits) + " dF " + pm(p.row.delta, p.row.delta_error) +
              (cell_ok ? "" : " (!)") + ";";
  }
  return {ok, detail};
}

Outcome c8_oracle() {
  double worst = 0.0;
  std::size_t pairs = 0;
  for (unsigned n = 2; n <= 4; ++n) {
    for (ModelKind model : {ModelKind::GUE, ModelKind::RandomSpin}) {
      const auto pair = reference_pair(model, n, split_seed(kSeed, "oracle N=" + std::to_string(n)));
      ProtocolConfig cfg;
      cfg.T = 100.0;
      cfg.n_samples = 120;
      cfg.pauli_ensemble = PauliEnsemble{PauliEnsembleKind::UniformFull, n};
      Rng rng(split_seed(kSeed, "oracle elements"));
      const auto elements = sample_ensemble(cfg, pair, rng, threads());
      for (std::size_t p = 0; p + 1 < elements.size(); p += 2) {
        const cplx fast =
            pair_overlap(elements[p], elements[p + 1], pair.first.eigenvalues, pair.second.eigenvalues);
        const cplx slow = direct_overlap_oracle(elements[p], elements[p + 1], pair.h1, pair.h2);
        worst = std::max(worst, std::abs(fast - slow) / std::max(1.0, std::abs(slow)));
        ++pairs;
      }
    }
  }
  return {worst <= 1e-8, std::to_string(pairs) + " pairs, max relative difference " + fmt("%.2e", worst)};
}

Outcome c9_identities() {
  double purity = 0.0;
  for (unsigned n = 1; n <= 4; ++n) {
    const auto pair = reference_pair(ModelKind::GUE, n, split_seed(kSeed, "purity"));
    for (Eigen::Index a = 0; a < pair.first.eigenvectors.cols(); ++a)
      purity = std::max(purity, std::abs(pauli_purity_sum(pair.first.eigenvectors.col(a), n) -
                                         std::ldexp(1.0, static_cast<int>(n))));
  }
  double residual = 0.0;
  double overlap_excess = -1.0;
  for (ModelKind model : {ModelKind::GUE, ModelKind::RandomSpin}) {
    const auto pair = reference_pair(model, 7, kSeed);
    residual = std::max({residual, relative_residual(pair.h1, pair.first),
                         relative_residual(pair.h2, pair.second)});
    ProtocolConfig cfg;
    cfg.pauli_ensemble = PauliEnsemble{PauliEnsembleKind::UniformFull, 7};
    Rng rng(SeedSchedule::from_master(kSeed).elements);
    const auto elements = sample_ensemble(cfg, pair, rng, threads());
    const auto table = overlap_table(elements, pair.first.eigenvalues, pair.second.eigenvalues, threads());
    for (std::size_t m = 0; m < table.size; ++m)
      for (std::size_t n = 0; n < table.size; ++n)
        overlap_excess = std::max(overlap_excess, std::sqrt(table.at(m, n)) / 128.0 - 1.0);
  }
  const bool ok = purity <= 1e-9 && residual <= 1e-10 && overlap_excess <= 1e-9;
  return {ok, "purity err " + fmt("%.2e", purity) + ", eigen residual " + fmt("%.2e", residual) +
                  ", max |tr|/D - 1 = " + fmt("%.2e", overlap_excess)};
}

Outcome c10_semicircle() {
  Rng rng(split_seed(kSeed, "gue draws"));
  int good = 0;
  double worst_ks = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    const auto spec = hermitian_eigendecompose(sample_gue(7, rng));
    const double ks = semicircle_ks_distance(spec);
    const double radius = spectral_width_stats(spec).radius;
    worst_ks = std::max(worst_ks, ks);
    if (ks <= 0.1 && radius >= 1.2 && radius <= 1.6) ++good;
  }
  return {good >= 19, std::to_string(good) + "/20 draws in band, max KS " + fmt("%.3g", worst_ks)};
}

Outcome c11_haar() {
  Rng rng(split_seed(kSeed, "haar"));
  std::vector<ComplexMatrix> unitaries;
  for (int m = 0; m < 400; ++m) unitaries.push_back(sample_haar_unitary(128, rng));
  const std::vector<int> ks{1, 2, 3};
  const auto est = estimate_from_table(overlap_table(unitaries, threads()), ks);
  bool ok = true;
  std::string detail;
  for (const auto& e : est) {
    ok = ok && within(e, factorial(e.k));
    detail += "F" + std::to_string(e.k) + " = " + pm(e.mean, e.std_error) + "; ";
  }
  return {ok, detail};
}

Outcome c12_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "chaosdesign_acceptance";
  fs::create_directories(dir);
  const std::vector<std::vector<std::string>> commands = {
      {"frame-potential", "--n", "7"},
      {"sweep-time", "--n", "5", "--k", "2,3", "--T-grid", "10,100,1000", "--samples", "200"},
      {"sweep-size", "--k", "2,3", "--n-list", "2,3,4,5", "--samples", "200"},
      {"pauli-spectrum", "--n", "6"},
  };
  bool ok = true;
  std::string detail;
  for (const auto& base : commands) {
    std::vector<std::string> payloads;
    for (const char* t : {"1", "1", "4"}) {
      const fs::path out = dir / (base[0] + "_" + std::to_string(payloads.size()) + ".csv");
      std::vector<std::string> args{"chaosdesign"};
      args.insert(args.end(), base.begin(), base.end());
      for (const char* extra : {"--seed", "7", "--threads", t, "--output"}) args.emplace_back(extra);
      args.push_back(out.string());
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream sink;
      const auto cfg = cli::parse_args(static_cast<int>(argv.size()), argv.data(), sink);
      if (!cfg || cli::run(*cfg, sink, sink) != cli::ExitCode::Ok) {
        ok = false;
        detail += base[0] + " failed to run; ";
        break;
      }
      std::ifstream f(out, std::ios::binary);
      payloads.emplace_back(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
    }
    const bool same = payloads.size() == 3 && payloads[0] == payloads[1] && payloads[0] == payloads[2];
    ok = ok && same;
    detail += base[0] + (same ? " identical; " : " DIFFERS; ");
  }
  return {ok, detail + "threads 1, 1, 4"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"exact k=2 prediction without Pauli (F2 = 6)", c1_no_pauli},
      {"exact k=2 prediction, full protocol", c2_full_protocol},
      {"design emergence k=1..4, GUE and spin, N=7", c3_design_emergence},
      {"exact 1-design", c4_one_design},
      {"Pauli spectrum mean and variance 1/(D+1)", c5_pauli_spectrum},
      {"finite-time crossing and 1/T^2 scaling", c6_finite_time},
      {"finite-size crossover, UniformIZ k=3", c7_finite_size},
      {"overlap kernel vs dense oracle", c8_oracle},
      {"exact identities", c9_identities},
      {"GUE semicircle", c10_semicircle},
      {"Haar baseline D=128", c11_haar},
      {"determinism across thread counts", c12_determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %2d: %s | %s [%.1fs]\n", o.passed ? "PASS" : "FAIL", id,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.passed ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
