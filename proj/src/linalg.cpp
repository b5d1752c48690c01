#include "chaosdesign/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "chaosdesign/errors.hpp"
#include "chaosdesign/rng.hpp"

namespace chaosdesign {

ComplexMatrix identity(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return ComplexMatrix::Identity(d, d);
}

double max_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double frobenius_norm(const ComplexMatrix& m) { return m.norm(); }

bool is_hermitian(const ComplexMatrix& h, double rel_tol) {
  if (h.rows() != h.cols()) return false;
  const double scale = max_norm(h);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = i; j < h.cols(); ++j)
      worst = std::max(worst, std::abs(h(i, j) - std::conj(h(j, i))));
  return worst <= rel_tol * scale;
}

bool is_unitary(const ComplexMatrix& u, double tol) {
  if (u.rows() != u.cols()) return false;
  ComplexMatrix g = u.adjoint() * u;
  g.diagonal().array() -= cplx(1.0, 0.0);
  return max_norm(g) <= tol;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    std::ostringstream msg;
    msg << "matmul: dimension mismatch " << a.rows() << "x" << a.cols() << " * " << b.rows()
        << "x" << b.cols();
    throw UsageError(msg.str());
  }
  return a * b;
}

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

cplx trace(const ComplexMatrix& a) { return a.trace(); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double relative_residual(const ComplexMatrix& h, const SpectralDecomposition& spec) {
  const double hn = h.norm();
  ComplexMatrix r = h * spec.eigenvectors;
  for (Eigen::Index c = 0; c < r.cols(); ++c)
    r.col(c) -= spec.eigenvalues[c] * spec.eigenvectors.col(c);
  return hn > 0.0 ? r.norm() / hn : r.norm();
}

SpectralDecomposition hermitian_eigendecompose(const ComplexMatrix& h, double tol) {
  if (h.rows() != h.cols() || h.rows() == 0)
    throw ValidationError("hermitian_eigendecompose: matrix must be square and non-empty");
  if (!(tol > 0.0)) throw ValidationError("hermitian_eigendecompose: tol must be positive");
  if (!is_hermitian(h)) throw ValidationError("hermitian_eigendecompose: input is not Hermitian");

  // Eigen's solver only reads the lower triangle; symmetrize explicitly so
  // the result does not depend on rounding noise in the upper half.
  const Eigen::MatrixXcd sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("hermitian_eigendecompose: tridiagonal QR iteration did not converge");

  SpectralDecomposition spec;
  spec.eigenvalues = solver.eigenvalues();
  spec.eigenvectors = solver.eigenvectors();

  // Eigen returns ascending order already; enforce it so the invariant does
  // not rest on an implementation detail.
  const auto d = spec.eigenvalues.size();
  if (!std::is_sorted(spec.eigenvalues.data(), spec.eigenvalues.data() + d)) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
      return spec.eigenvalues[a] < spec.eigenvalues[b];
    });
    SpectralDecomposition sorted{RealVector(d), ComplexMatrix(d, d)};
    for (Eigen::Index c = 0; c < d; ++c) {
      sorted.eigenvalues[c] = spec.eigenvalues[order[c]];
      sorted.eigenvectors.col(c) = spec.eigenvectors.col(order[c]);
    }
    spec = std::move(sorted);
  }

  const double residual = relative_residual(h, spec);
  if (!(residual <= tol)) {
    // Report the worst off-diagonal entry of V^dagger H V, i.e. how far the
    // basis is from diagonalizing H.
    ComplexMatrix rotated = spec.eigenvectors.adjoint() * h * spec.eigenvectors;
    rotated.diagonal().setZero();
    std::ostringstream msg;
    msg << "hermitian_eigendecompose: residual " << residual << " exceeds tolerance " << tol
        << " (worst off-diagonal " << max_norm(rotated) << ")";
    throw ConvergenceError(msg.str());
  }
  return spec;
}

ComplexMatrix sample_haar_unitary(std::size_t dim, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(dim);
  const double s = std::sqrt(0.5);
  Eigen::MatrixXcd z(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = cplx(s * rng.normal(), s * rng.normal());

  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (Eigen::Index c = 0; c < d; ++c) {
    const cplx rc = r(c, c);
    const double mag = std::abs(rc);
    q.col(c) *= mag > 0.0 ? rc / mag : cplx(1.0, 0.0);
  }
  return q;
}

}  // namespace chaosdesign
