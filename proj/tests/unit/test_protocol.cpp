#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chaosdesign/errors.hpp"
#include "chaosdesign/protocol.hpp"
#include "chaosdesign/rng.hpp"

using namespace chaosdesign;

namespace {

HamiltonianPair gue_pair(unsigned n, std::uint64_t seed) {
  return prepare_pair(HamiltonianModel{ModelKind::GUE, n, seed},
                      HamiltonianModel{ModelKind::GUE, n, seed + 1});
}

ProtocolConfig config(unsigned n, PauliEnsembleKind kind, double T, std::size_t m) {
  ProtocolConfig cfg;
  cfg.T = T;
  cfg.n_samples = m;
  cfg.pauli_ensemble = PauliEnsemble{kind, n};
  return cfg;
}

// Leave-one-out by recomputing the pair mean from scratch without element m.
std::pair<double, double> brute_force_jackknife(const OverlapTable& t, int k) {
  const std::size_t m_count = t.size;
  auto mean_without = [&](std::size_t skip) {
    double s = 0.0;
    double c = 0.0;
    for (std::size_t a = 0; a < m_count; ++a)
      for (std::size_t b = 0; b < m_count; ++b)
        if (a != b && a != skip && b != skip) {
          s += std::pow(t.at(a, b), k);
          c += 1;
        }
    return s / c;
  };
  const double full = mean_without(m_count);
  std::vector<double> loo;
  for (std::size_t m = 0; m < m_count; ++m) loo.push_back(mean_without(m));
  double avg = 0.0;
  for (double v : loo) avg += v;
  avg /= m_count;
  double ss = 0.0;
  for (double v : loo) ss += (v - avg) * (v - avg);
  return {full, std::sqrt((m_count - 1.0) / m_count * ss)};
}

}  // namespace

TEST_CASE("config validation") {
  ProtocolConfig cfg = config(2, PauliEnsembleKind::UniformFull, 1.0, 2);
  CHECK_NOTHROW(validate(cfg));
  cfg.n_samples = 1;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg.n_samples = 2;
  cfg.T = 0.0;
  CHECK_THROWS_AS(validate(cfg), ValidationError);
  cfg.T = 1.0;
  cfg.k_list = {0};
  CHECK_THROWS_AS(validate(cfg), ValidationError);
}

TEST_CASE("transition matrices are unitary; identity Pauli with equal spectra gives I") {
  const auto pair = gue_pair(5, 40);
  Rng rng(1);
  const auto e = sample_element(config(5, PauliEnsembleKind::UniformFull, 10.0, 2), pair.first,
                                pair.second, rng);
  CHECK(is_unitary(e.transition, 1e-9));

  const auto same = prepare_pair(pair.h1, pair.h1);
  const auto f = sample_element(config(5, PauliEnsembleKind::IdentityOnly, 10.0, 2), same.first,
                                same.second, rng);
  CHECK(max_norm(f.transition - identity(32)) <= 1e-10);
}

TEST_CASE("evolution times are uniform on [0, T]") {
  Rng rng(2);
  const auto cfg = config(3, PauliEnsembleKind::UniformFull, 7.0, 2);
  const int n = 10000;
  double s1 = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto d = draw_element(cfg, rng);
    CHECK(d.t1 >= 0.0);
    CHECK(d.t1 <= 7.0);
    s1 += d.t1;
    s2 += d.t2;
  }
  const double se = 7.0 / std::sqrt(12.0 * n);
  CHECK(std::abs(s1 / n - 3.5) < 3 * se);
  CHECK(std::abs(s2 / n - 3.5) < 3 * se);
}

TEST_CASE("fast overlap kernel agrees with the dense oracle") {
  for (unsigned n = 2; n <= 4; ++n) {
    for (ModelKind model : {ModelKind::GUE, ModelKind::RandomSpin}) {
      const auto pair = prepare_pair(HamiltonianModel{model, n, 10 * n}, HamiltonianModel{model, n, 10 * n + 1});
      Rng rng(n);
      const auto elements =
          sample_ensemble(config(n, PauliEnsembleKind::UniformFull, 30.0, 100), pair, rng);
      for (std::size_t p = 0; p < 50; ++p) {
        const auto& e = elements[2 * p];
        const auto& f = elements[2 * p + 1];
        const cplx fast = pair_overlap(e, f, pair.first.eigenvalues, pair.second.eigenvalues);
        const cplx slow = direct_overlap_oracle(e, f, pair.h1, pair.h2);
        CHECK(std::abs(fast - slow) <= 1e-8 * std::max(1.0, std::abs(slow)));
        const cplx back = pair_overlap(f, e, pair.first.eigenvalues, pair.second.eigenvalues);
        CHECK(std::abs(fast - std::conj(back)) <= 1e-12 * std::max(1.0, std::abs(fast)));
        CHECK(std::abs(fast) <= pair.dim() * (1 + 1e-9));
      }
    }
  }
}

TEST_CASE("self overlap is D and the same-Pauli reduction is a spectral trace") {
  const auto pair = gue_pair(4, 50);
  Rng rng(3);
  const auto cfg = config(4, PauliEnsembleKind::UniformFull, 5.0, 2);
  const auto e = sample_element(cfg, pair.first, pair.second, rng);
  CHECK(std::abs(pair_overlap(e, e, pair.first.eigenvalues, pair.second.eigenvalues) - 16.0) <= 1e-12);
  CHECK(std::abs(direct_overlap_oracle(e, e, pair.h1, pair.h2) - 16.0) <= 1e-9);

  const double tau = 0.83;
  const auto f = build_element(ElementDraw{e.t1 - tau, e.t2, e.pauli}, pair.first, pair.second);
  cplx expected = 0.0;
  for (Eigen::Index i = 0; i < 16; ++i) expected += std::polar(1.0, -tau * pair.first.eigenvalues[i]);
  CHECK(std::abs(pair_overlap(e, f, pair.first.eigenvalues, pair.second.eigenvalues) - expected) <=
        1e-9 * 16);
}

TEST_CASE("elements from different Hamiltonian pairs are rejected") {
  const auto a = gue_pair(2, 60);
  const auto b = gue_pair(2, 70);
  Rng rng(4);
  const auto cfg = config(2, PauliEnsembleKind::UniformFull, 5.0, 2);
  const auto e = sample_element(cfg, a.first, a.second, rng);
  const auto f = sample_element(cfg, b.first, b.second, rng);
  CHECK_THROWS_AS(pair_overlap(e, f, a.first.eigenvalues, a.second.eigenvalues), UsageError);
}

TEST_CASE("overlap table matches pairwise overlaps and is thread independent") {
  const auto pair = gue_pair(4, 80);
  Rng rng(5);
  const auto elements = sample_ensemble(config(4, PauliEnsembleKind::UniformFull, 40.0, 70), pair, rng);
  const auto one = overlap_table(elements, pair.first.eigenvalues, pair.second.eigenvalues, 1);
  const auto four = overlap_table(elements, pair.first.eigenvalues, pair.second.eigenvalues, 4);
  CHECK(one.abs2 == four.abs2);
  for (std::size_t m = 0; m < 70; m += 7)
    for (std::size_t n = 0; n < 70; n += 5) {
      const double direct =
          std::norm(pair_overlap(elements[m], elements[n], pair.first.eigenvalues, pair.second.eigenvalues));
      CHECK(one.at(m, n) == doctest::Approx(direct).epsilon(1e-10));
    }
}

TEST_CASE("jackknife matches a brute-force leave-one-out") {
  const auto pair = gue_pair(3, 90);
  Rng rng(6);
  const auto elements = sample_ensemble(config(3, PauliEnsembleKind::UniformFull, 10.0, 23), pair, rng);
  const auto table = overlap_table(elements, pair.first.eigenvalues, pair.second.eigenvalues);
  const std::vector<int> ks{1, 2, 3};
  const auto est = estimate_from_table(table, ks);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto [mean, se] = brute_force_jackknife(table, ks[i]);
    CHECK(est[i].mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(est[i].std_error == doctest::Approx(se).epsilon(1e-9));
    CHECK(est[i].n_pairs == 23 * 22);
  }
}

TEST_CASE("two elements: mean defined, error undefined") {
  OverlapTable t{2, 2, {4.0, 1.5, 1.5, 4.0}};
  const std::vector<int> ks{1};
  const auto est = estimate_from_table(t, ks);
  CHECK(est[0].mean == 1.5);
  CHECK(std::isnan(est[0].std_error));
  OverlapTable tiny{1, 2, {4.0}};
  CHECK_THROWS_AS(estimate_from_table(tiny, ks), UsageError);
}

TEST_CASE("log-space accumulation keeps huge powers finite in log form") {
  OverlapTable t{3, 1, {}};
  const double big = 1e200;
  t.abs2 = {0, big, 2 * big, big, 0, 3 * big, 2 * big, 3 * big, 0};
  const std::vector<int> ks{4};
  const auto est = estimate_from_table(t, ks);
  CHECK(est[0].log_space);
  const double expected = 4 * std::log(big) + std::log((1.0 + 16.0 + 81.0) / 3.0);
  CHECK(est[0].log_mean == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("identical elements give D^(2k)") {
  const auto pair = gue_pair(2, 100);
  Rng rng(7);
  const auto e = sample_element(config(2, PauliEnsembleKind::UniformFull, 5.0, 2), pair.first, pair.second, rng);
  const std::vector<SampledElement> same(5, e);
  const std::vector<int> ks{1, 2, 3};
  const auto est = estimate_frame_potentials(same, pair.first.eigenvalues, pair.second.eigenvalues, ks);
  CHECK(est[0].mean == doctest::Approx(16.0));
  CHECK(est[1].mean == doctest::Approx(256.0));
  CHECK(est[2].mean == doctest::Approx(4096.0));
}

TEST_CASE("single-qubit Pauli group is an exact 1-design") {
  std::vector<ComplexMatrix> group;
  for (const char* s : {"I", "X", "Y", "Z"}) group.push_back(to_dense(PauliString::parse(s)));
  CHECK(exact_frame_potential(group, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(exact_frame_potential(group, 2) == doctest::Approx(4.0));
}

TEST_CASE("Haar baseline at D = 32") {
  Rng rng(8);
  std::vector<ComplexMatrix> u;
  for (int i = 0; i < 400; ++i) u.push_back(sample_haar_unitary(32, rng));
  const std::vector<int> ks{1, 2};
  const auto est = estimate_from_table(overlap_table(u, 1), ks);
  CHECK(std::abs(est[0].mean - 1.0) <= 3 * est[0].std_error);
  CHECK(std::abs(est[1].mean - 2.0) <= 3 * est[1].std_error);
}

TEST_CASE("closed-form predictions") {
  CHECK(f_2sp(2) == 6.0);
  CHECK(f_2sp(3) == doctest::Approx(std::numbers::e * 36).epsilon(1e-15));
  CHECK_THROWS_AS(f_2sp(1), UsageError);
  CHECK(predict_frame_potential(1, 0.3).predicted == 1.0);
  CHECK(predict_frame_potential(2, 1.0).predicted == 6.0);
  CHECK(predict_frame_potential(2, 0.0).predicted == 2.0);
  CHECK(predict_frame_potential(2, std::pow(4.0, -7)).predicted == doctest::Approx(2.000244140625));
  CHECK(predict_frame_potential(3, 0.1).approximate);
  CHECK(normalized_deviation(2, 2.0) == 0.0);
  CHECK(normalized_deviation(2, 6.0) == 2.0);
  CHECK(normalized_deviation(3, 6.6) == doctest::Approx(0.1));
}

TEST_CASE("critical system sizes") {
  const double eta = std::exp(-1.0);
  CHECK(critical_system_size(2, eta, PauliEnsembleKind::UniformIZ) == 4u);
  CHECK(critical_system_size(2, eta, PauliEnsembleKind::UniformFull) == 2u);
  CHECK(critical_system_size(3, eta, PauliEnsembleKind::UniformIZ) == 6u);
  CHECK_FALSE(critical_system_size(2, 1.0, PauliEnsembleKind::IdentityOnly).has_value());
  // 1/(N+1) <= threshold with threshold = eta k!/f_2sp(k).
  const auto prefix = critical_system_size(3, eta, PauliEnsembleKind::PrefixZ);
  REQUIRE(prefix.has_value());
  const double thr = eta * 6.0 / f_2sp(3);
  CHECK(1.0 / (*prefix + 1.0) <= thr);
  CHECK(1.0 / double(*prefix) > thr);
}
