#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace chaosdesign {

class Rng;

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Rows are contiguous, so Pauli row
/// permutations and flattened overlap kernels read memory linearly.
using ComplexMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kDefaultEigenTolerance = 1e-10;

/// Eigenvalues in ascending order together with the matching eigenvector
/// columns. Eigenvectors form a unitary matrix.
struct SpectralDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

ComplexMatrix identity(std::size_t dim);

/// max |M_ij|
double max_norm(const ComplexMatrix& m);
double frobenius_norm(const ComplexMatrix& m);

/// max |H_ij - conj(H_ji)| <= rel_tol * maxnorm(H)
bool is_hermitian(const ComplexMatrix& h, double rel_tol = 1e-12);
/// maxnorm(U^dagger U - I) <= tol
bool is_unitary(const ComplexMatrix& u, double tol = 1e-10);

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& a);
cplx trace(const ComplexMatrix& a);

/// Kronecker product a (x) b, with a acting on the high-order bits.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Householder tridiagonalization followed by implicit-shift QR on the
/// tridiagonal form. Throws ValidationError for non-Hermitian input and
/// ConvergenceError if the iteration stalls or the verified residual
/// ||H V - V diag(E)||_F exceeds tol * ||H||_F.
SpectralDecomposition hermitian_eigendecompose(const ComplexMatrix& h,
                                               double tol = kDefaultEigenTolerance);

/// ||H V - V diag(E)||_F / ||H||_F (0 when H is the zero matrix).
double relative_residual(const ComplexMatrix& h, const SpectralDecomposition& spec);

/// V diag(f(E)) V^dagger for a scalar function applied to the spectrum.
template <typename Fn>
ComplexMatrix spectral_function(const SpectralDecomposition& spec, Fn&& fn) {
  const auto d = static_cast<Eigen::Index>(spec.dim());
  ComplexMatrix scaled = spec.eigenvectors;
  for (Eigen::Index c = 0; c < d; ++c) scaled.col(c) *= fn(spec.eigenvalues[c]);
  return scaled * spec.eigenvectors.adjoint();
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// diagonal of R rotated to be real positive.
ComplexMatrix sample_haar_unitary(std::size_t dim, Rng& rng);

}  // namespace chaosdesign
