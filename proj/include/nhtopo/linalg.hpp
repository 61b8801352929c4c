#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nhtopo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Mat2 = Eigen::Matrix2cd;

inline constexpr Complex kI{0.0, 1.0};

namespace pauli {
Mat2 x();
Mat2 y();
Mat2 z();
}  // namespace pauli

/// Block-diagonal repetition of a 2x2 matrix over `cells` unit cells.
ComplexMatrix repeat_cells(const Mat2& block, int cells);

/// Largest absolute entry.
double max_abs(const ComplexMatrix& m);

/// Eigenvalues paired with right/left eigenvectors, left.adjoint() * right = 1.
/// Right eigenvectors are unit-normalized.
struct BiorthogonalDecomposition {
  ComplexVector eigenvalues;
  ComplexMatrix right;
  ComplexMatrix left;
  /// Groups of indices whose eigenvalues coincide within the degeneracy tolerance.
  std::vector<std::vector<int>> clusters;
  /// Condition number of the (column-normalized) right eigenvector matrix.
  double condition = 1.0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

struct SpectralOptions {
  /// Relative tolerance for clustering eigenvalues; also bounds the
  /// eigenvector condition number at 1/degeneracy_tol.
  double degeneracy_tol = 1e-8;
  /// Add a seeded random Hermitian perturbation of size 1e-10 before
  /// decomposing, treating exceptional points as a limit.
  bool perturb_exceptional = false;
};

/// Throws Error(Defective) when the eigenvector matrix is too ill-conditioned.
BiorthogonalDecomposition biorthogonal_eigen(const ComplexMatrix& h,
                                             const SpectralOptions& options = {});

/// R diag(values) L^dagger for the given decomposition.
ComplexMatrix spectral_compose(const BiorthogonalDecomposition& decomposition,
                               const ComplexVector& values);

/// Orthonormal eigenbasis and real spectrum of a Hermitian matrix, ascending.
struct HermitianSpectrum {
  RealVector values;
  ComplexMatrix vectors;
};

HermitianSpectrum hermitian_eigen(const ComplexMatrix& h);

/// Apply a real function to the spectrum of a Hermitian matrix.
template <typename F>
ComplexMatrix hermitian_function(const ComplexMatrix& h, F&& f) {
  HermitianSpectrum spectrum = hermitian_eigen(h);
  ComplexVector mapped(spectrum.values.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped(i) = f(spectrum.values(i));
  return spectrum.vectors * mapped.asDiagonal() * spectrum.vectors.adjoint();
}

/// Result of orthogonalizing graded columns: B = X diag(exp(log_scale)) is
/// replaced by orthonormal U and log singular values so that
/// B B^dagger = U diag(exp(2 log_scale)) U^dagger.
template <typename Scalar>
struct GradedGram {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
  RealVector log_scale;
};

/// One-sided Jacobi on columns carried as (direction, log norm) pairs. Singular
/// values are recovered with relative accuracy even when their range exceeds
/// the double exponent range, provided the directions are well-conditioned.
template <typename Scalar>
GradedGram<Scalar> orthogonalize_graded(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> columns,
                                        RealVector log_scale);

/// Hermitian part (A + A^dagger) / 2.
ComplexMatrix hermitian_part(const ComplexMatrix& a);

}  // namespace nhtopo
