#include <algorithm>
#include <cmath>
#include <limits>

#include "chaosdesign/errors.hpp"
#include "chaosdesign/parallel.hpp"
#include "chaosdesign/protocol.hpp"

namespace chaosdesign {

namespace {

constexpr std::size_t kTile = 32;
// exp(600) is far from DBL_MAX but leaves room for summing 10^5 pairs.
constexpr double kLogSpaceThreshold = 600.0;

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowFiller = std::function<void(std::size_t, cplx*)>;

// Entry (m, n) of the table is |<G_n, G_m>|^2 where G_m is the flattened
// row produced by fill(m). Tiles (I, J) with I <= J are independent tasks
// and write disjoint blocks of the table.
OverlapTable tiled_table(std::size_t m_count, std::size_t dim, const RowFiller& fill,
                         unsigned threads) {
  OverlapTable table;
  table.size = m_count;
  table.dim = dim;
  table.abs2.assign(m_count * m_count, 0.0);
  const std::size_t row_len = dim * dim;
  const std::size_t n_tiles = (m_count + kTile - 1) / kTile;

  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t i = 0; i < n_tiles; ++i)
    for (std::size_t j = i; j < n_tiles; ++j) tasks.emplace_back(i, j);

  auto load = [&](std::size_t tile, RowMatrix& buf) {
    const std::size_t begin = tile * kTile;
    const std::size_t end = std::min(m_count, begin + kTile);
    buf.resize(static_cast<Eigen::Index>(end - begin), static_cast<Eigen::Index>(row_len));
    for (std::size_t m = begin; m < end; ++m) fill(m, buf.row(static_cast<Eigen::Index>(m - begin)).data());
  };

  parallel_for(tasks.size(), threads, [&](std::size_t t) {
    const auto [ti, tj] = tasks[t];
    RowMatrix a;
    load(ti, a);
    const std::size_t r0 = ti * kTile;
    const std::size_t c0 = tj * kTile;
    if (ti == tj) {
      const Eigen::MatrixXcd gram = a * a.adjoint();
      for (Eigen::Index r = 0; r < gram.rows(); ++r) {
        for (Eigen::Index c = r; c < gram.cols(); ++c) {
          const double v = std::norm(gram(r, c));
          table.abs2[(r0 + r) * m_count + (c0 + c)] = v;
          table.abs2[(c0 + c) * m_count + (r0 + r)] = v;
        }
      }
      return;
    }
    RowMatrix b;
    load(tj, b);
    const Eigen::MatrixXcd gram = a * b.adjoint();
    for (Eigen::Index r = 0; r < gram.rows(); ++r) {
      for (Eigen::Index c = 0; c < gram.cols(); ++c) {
        const double v = std::norm(gram(r, c));
        table.abs2[(r0 + r) * m_count + (c0 + c)] = v;
        table.abs2[(c0 + c) * m_count + (r0 + r)] = v;
      }
    }
  });
  return table;
}

}  // namespace

OverlapTable overlap_table(const std::vector<SampledElement>& elements,
                           const RealVector& first_energies, const RealVector& second_energies,
                           unsigned threads) {
  if (elements.empty()) return {};
  const Eigen::Index d = first_energies.size();
  const std::uint64_t tag = elements.front().provenance;
  for (const auto& e : elements) {
    if (e.provenance != tag)
      throw UsageError("overlap_table: elements were built against different Hamiltonian pairs");
    if (e.transition.rows() != d || second_energies.size() != d)
      throw UsageError("overlap_table: dimension mismatch");
  }

  // G_ai = exp(-i t2 eps_a) exp(-i t1 E_i) C_ai, so that <G_f, G_e> is the
  // overlap expansion with dt = t_e - t_f.
  const RowFiller fill = [&](std::size_t m, cplx* out) {
    const SampledElement& e = elements[m];
    ComplexVector alpha(d);
    for (Eigen::Index i = 0; i < d; ++i) alpha[i] = std::polar(1.0, -e.t1 * first_energies[i]);
    for (Eigen::Index a = 0; a < d; ++a) {
      const cplx beta = std::polar(1.0, -e.t2 * second_energies[a]);
      const cplx* c = e.transition.row(a).data();
      cplx* row = out + a * d;
      for (Eigen::Index i = 0; i < d; ++i) row[i] = beta * alpha[i] * c[i];
    }
  };
  return tiled_table(elements.size(), static_cast<std::size_t>(d), fill, threads);
}

OverlapTable overlap_table(std::span<const ComplexMatrix> unitaries, unsigned threads) {
  if (unitaries.empty()) return {};
  const Eigen::Index d = unitaries.front().rows();
  for (const auto& u : unitaries)
    if (u.rows() != d || u.cols() != d) throw UsageError("overlap_table: dimension mismatch");
  const RowFiller fill = [&](std::size_t m, cplx* out) {
    std::copy_n(unitaries[m].data(), d * d, out);
  };
  return tiled_table(unitaries.size(), static_cast<std::size_t>(d), fill, threads);
}

std::vector<FramePotentialEstimate> estimate_from_table(const OverlapTable& table,
                                                        std::span<const int> k_list,
                                                        const PairFilter& include) {
  const std::size_t m_count = table.size;
  if (m_count < 2) throw UsageError("estimate_from_table: need at least 2 elements");

  std::vector<std::uint8_t> keep(m_count * m_count, 1);
  if (include) {
    for (std::size_t m = 0; m < m_count; ++m)
      for (std::size_t n = m + 1; n < m_count; ++n)
        keep[m * m_count + n] = keep[n * m_count + m] = include(m, n) ? 1 : 0;
  }

  double max_abs2 = 0.0;
  for (std::size_t m = 0; m < m_count; ++m)
    for (std::size_t n = m + 1; n < m_count; ++n)
      if (keep[m * m_count + n]) max_abs2 = std::max(max_abs2, table.at(m, n));

  std::vector<FramePotentialEstimate> out;
  for (int k : k_list) {
    if (k < 1) throw UsageError("estimate_from_table: k must be >= 1");
    FramePotentialEstimate est;
    est.k = k;
    const double max_log = max_abs2 > 0.0 ? k * std::log(max_abs2) : 0.0;
    est.log_space = max_log > kLogSpaceThreshold;
    const double shift = est.log_space ? max_log : 0.0;
    auto power = [&](double v) {
      return est.log_space ? std::exp(k * std::log(v) - shift) : std::pow(v, k);
    };

    double total = 0.0;
    std::size_t count = 0;
    std::vector<double> row_sum(m_count, 0.0);
    std::vector<std::size_t> row_count(m_count, 0);
    for (std::size_t m = 0; m < m_count; ++m) {
      for (std::size_t n = m + 1; n < m_count; ++n) {
        if (!keep[m * m_count + n]) continue;
        const double x = power(table.at(m, n));
        total += x;
        ++count;
        row_sum[m] += x;
        row_sum[n] += x;
        ++row_count[m];
        ++row_count[n];
      }
    }
    est.n_pairs = 2 * count;
    if (count == 0) {
      est.mean = est.std_error = est.log_mean = std::numeric_limits<double>::quiet_NaN();
      out.push_back(est);
      continue;
    }

    const double scaled_mean = total / static_cast<double>(count);
    // Jackknife: dropping element m removes its row from the pair sum.
    std::vector<double> loo(m_count);
    bool defined = true;
    for (std::size_t m = 0; m < m_count; ++m) {
      const std::size_t left = count - row_count[m];
      if (left == 0) {
        defined = false;
        break;
      }
      loo[m] = (total - row_sum[m]) / static_cast<double>(left);
    }
    double scaled_error = std::numeric_limits<double>::quiet_NaN();
    if (defined) {
      double loo_mean = 0.0;
      for (double v : loo) loo_mean += v;
      loo_mean /= static_cast<double>(m_count);
      double ss = 0.0;
      for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
      scaled_error = std::sqrt(ss * static_cast<double>(m_count - 1) / static_cast<double>(m_count));
    }

    const double scale = est.log_space ? std::exp(shift) : 1.0;
    est.mean = scaled_mean * scale;
    est.std_error = scaled_error * scale;
    est.log_mean = std::log(scaled_mean) + shift;
    out.push_back(est);
  }
  return out;
}

std::vector<FramePotentialEstimate> estimate_frame_potentials(
    const std::vector<SampledElement>& elements, const RealVector& first_energies,
    const RealVector& second_energies, std::span<const int> k_list, unsigned threads) {
  if (elements.size() < 2) throw UsageError("estimate_frame_potentials: need at least 2 elements");
  return estimate_from_table(overlap_table(elements, first_energies, second_energies, threads), k_list);
}

double exact_frame_potential(std::span<const ComplexMatrix> members, int k) {
  if (members.empty()) throw UsageError("exact_frame_potential: empty ensemble");
  if (k < 1) throw UsageError("exact_frame_potential: k must be >= 1");
  const OverlapTable table = overlap_table(members, 1);
  double total = 0.0;
  for (double v : table.abs2) total += std::pow(v, k);
  return total / static_cast<double>(table.abs2.size());
}

}  // namespace chaosdesign
