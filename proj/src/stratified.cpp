#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chaosdesign/errors.hpp"
#include "chaosdesign/parallel.hpp"
#include "chaosdesign/protocol.hpp"
#include "chaosdesign/rng.hpp"

namespace chaosdesign {

namespace {

using RealRowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Law of t - t' for t, t' independent uniform on [0, T].
double triangular_density(double x, double T) {
  const double ax = std::abs(x);
  return ax < T ? (T - ax) / (T * T) : 0.0;
}

// Even mixture of the triangular law and a Cauchy of scale s truncated to
// [-T, T]; the density ratio target/proposal never exceeds 2.
class TimeDifferenceProposal {
 public:
  TimeDifferenceProposal(double T, double scale)
      : T_(T), s_(std::min(scale, T)), half_angle_(std::atan(T / s_)) {}

  // Returns (sample, target density / proposal density).
  std::pair<double, double> draw(Rng& rng) const {
    double x;
    if (rng.uniform() < 0.5) {
      x = T_ * (rng.uniform() - rng.uniform());
    } else {
      x = s_ * std::tan(rng.uniform(-half_angle_, half_angle_));
    }
    const double cauchy = 1.0 / (2.0 * half_angle_ * s_ * (1.0 + (x / s_) * (x / s_)));
    const double target = triangular_density(x, T_);
    return {x, target / (0.5 * target + 0.5 * cauchy)};
  }

 private:
  double T_;
  double s_;
  double half_angle_;
};

double proposal_scale(const SpectralDecomposition& spec, double factor, double T) {
  const auto d = spec.eigenvalues.size();
  const double width = d > 1 ? spec.eigenvalues[d - 1] - spec.eigenvalues[0] : 0.0;
  return width > 0.0 ? factor / width : T;
}

FramePotentialEstimate batch_estimate(int k, const std::vector<double>& batch_means,
                                      std::size_t samples) {
  FramePotentialEstimate est;
  est.k = k;
  est.n_pairs = samples;
  const double n = static_cast<double>(batch_means.size());
  double mean = 0.0;
  for (double v : batch_means) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : batch_means) ss += (v - mean) * (v - mean);
  est.mean = mean;
  est.std_error = batch_means.size() > 1 ? std::sqrt(ss / (n - 1.0) / n)
                                         : std::numeric_limits<double>::quiet_NaN();
  est.log_mean = std::log(mean);
  return est;
}

}  // namespace

StratifiedEstimate estimate_frame_potentials_stratified(const ProtocolConfig& cfg,
                                                        const HamiltonianPair& pair,
                                                        Rng& element_rng, Rng& coincidence_rng,
                                                        const StratifiedOptions& options,
                                                        unsigned threads) {
  validate(cfg);
  if (options.coincident_paulis < 1 || options.time_samples < 1)
    throw ValidationError("stratified estimator: need at least one Pauli and one time sample");
  const auto d = static_cast<Eigen::Index>(pair.dim());
  for (int k : cfg.k_list)
    if (2.0 * k * std::log(static_cast<double>(d)) > 700.0)
      throw UsageError("stratified estimator: |tr|^{2k} would overflow; lower k");

  StratifiedEstimate result;
  result.p0 = collision_probability(cfg.pauli_ensemble);

  // Coincident stratum: tr[V^dagger U] = sum_{a,i} X_ai exp(-i dt1 E_i - i dt2 eps_a)
  // with X = |W2^dagger P W1|^2.
  const std::size_t n_paulis = options.coincident_paulis;
  const std::size_t n_times = options.time_samples;
  std::vector<PauliString> paulis;
  std::vector<std::uint64_t> batch_seeds;
  for (std::size_t l = 0; l < n_paulis; ++l) {
    paulis.push_back(sample_pauli(cfg.pauli_ensemble, coincidence_rng));
    batch_seeds.push_back(coincidence_rng.bits());
  }
  const TimeDifferenceProposal first_proposal(
      cfg.T, proposal_scale(pair.first, options.proposal_scale, cfg.T));
  const TimeDifferenceProposal second_proposal(
      cfg.T, proposal_scale(pair.second, options.proposal_scale, cfg.T));
  const std::size_t n_k = cfg.k_list.size();
  std::vector<std::vector<double>> batch_means(n_k, std::vector<double>(n_paulis, 0.0));

  parallel_for(n_paulis, threads, [&](std::size_t l) {
    const ComplexMatrix c =
        pair.second.eigenvectors.adjoint() * apply_to_matrix_left(paulis[l], pair.first.eigenvectors);
    const RealRowMatrix x = c.cwiseAbs2();
    Rng rng(batch_seeds[l]);
    std::vector<double> weight(n_times);
    Eigen::MatrixXd cos1(d, static_cast<Eigen::Index>(n_times));
    Eigen::MatrixXd sin1(d, static_cast<Eigen::Index>(n_times));
    Eigen::MatrixXcd beta(d, static_cast<Eigen::Index>(n_times));
    for (std::size_t s = 0; s < n_times; ++s) {
      const auto [dt1, w1] = first_proposal.draw(rng);
      const auto [dt2, w2] = second_proposal.draw(rng);
      weight[s] = w1 * w2;
      const auto col = static_cast<Eigen::Index>(s);
      for (Eigen::Index i = 0; i < d; ++i) {
        const double phase = -dt1 * pair.first.eigenvalues[i];
        cos1(i, col) = std::cos(phase);
        sin1(i, col) = std::sin(phase);
        beta(i, col) = std::polar(1.0, -dt2 * pair.second.eigenvalues[i]);
      }
    }
    const Eigen::MatrixXd y_re = x * cos1;
    const Eigen::MatrixXd y_im = x * sin1;
    for (std::size_t s = 0; s < n_times; ++s) {
      const auto col = static_cast<Eigen::Index>(s);
      cplx tr = 0.0;
      for (Eigen::Index a = 0; a < d; ++a) tr += beta(a, col) * cplx(y_re(a, col), y_im(a, col));
      const double abs2 = std::norm(tr);
      for (std::size_t ki = 0; ki < n_k; ++ki)
        batch_means[ki][l] += weight[s] * std::pow(abs2, cfg.k_list[ki]);
    }
    for (std::size_t ki = 0; ki < n_k; ++ki) batch_means[ki][l] /= static_cast<double>(n_times);
  });
  for (std::size_t ki = 0; ki < n_k; ++ki)
    result.coincident.push_back(batch_estimate(cfg.k_list[ki], batch_means[ki], n_paulis * n_times));

  // Distinct stratum: ordinary pair estimator over pairs whose Paulis differ.
  if (result.p0 < 1.0) {
    const std::vector<SampledElement> elements = sample_ensemble(cfg, pair, element_rng, threads);
    const OverlapTable table =
        overlap_table(elements, pair.first.eigenvalues, pair.second.eigenvalues, threads);
    result.distinct = estimate_from_table(table, cfg.k_list, [&](std::size_t m, std::size_t n) {
      return !(elements[m].pauli == elements[n].pauli);
    });
  } else {
    for (int k : cfg.k_list) {
      FramePotentialEstimate empty;
      empty.k = k;
      empty.mean = empty.std_error = empty.log_mean = std::numeric_limits<double>::quiet_NaN();
      result.distinct.push_back(empty);
    }
  }

  const double p0 = result.p0;
  for (std::size_t ki = 0; ki < n_k; ++ki) {
    const auto& same = result.coincident[ki];
    const auto& diff = result.distinct[ki];
    FramePotentialEstimate est;
    est.k = cfg.k_list[ki];
    if (p0 >= 1.0) {
      est = same;
    } else {
      est.mean = p0 * same.mean + (1.0 - p0) * diff.mean;
      est.std_error = std::hypot(p0 * same.std_error, (1.0 - p0) * diff.std_error);
      est.n_pairs = same.n_pairs + diff.n_pairs;
      est.log_mean = std::log(est.mean);
    }
    result.combined.push_back(est);
  }
  return result;
}

}  // namespace chaosdesign
