#pragma once

#include <map>
#include <string>
#include <vector>

#include "nhtopo/linalg.hpp"

namespace nhtopo {

struct GeneralSystem {
  ComplexMatrix H;
  /// Single-particle forms of the bath coupling operators.
  std::vector<ComplexMatrix> couplings;
};

struct MetricOptions {
  SpectralOptions spectral;
  /// A spectrum counts as real when max |Im E| <= real_tol * max(1, spectral radius).
  double real_tol = 1e-9;
  /// Relative singular-value threshold for the constraint nullspace.
  double null_tol = 1e-10;
  /// Modes within max_im_tol * max(1, spectral radius) of the largest imaginary
  /// part are retained by the complex-spectrum reduction.
  double max_im_tol = 1e-9;
};

struct MetricSolution {
  /// Positive-definite (or, after reduction, positive-semidefinite) metric with
  /// unit (pseudo-)determinant.
  ComplexMatrix T_c;
  /// Diagonal of T_c in the right-eigenvector frame, one entry per mode of
  /// `basis`; zero for modes removed by a reduction.
  RealVector mode_weights;
  BiorthogonalDecomposition basis;
  int nullspace_dim = 0;
  /// More than one admissible metric up to scale.
  bool non_unique = false;
  /// "conjugacy": |H T - T H^dagger|; "undaggered": |H T - T H|;
  /// "coupling": max_a |[C_a, T]| (reduced: |P C_a P T - T P^dagger C_a P^dagger|);
  /// "log_commutator": max_a |[log T, C_a]| (full solves only).
  std::map<std::string, double> residuals;
};

/// H - i max(Im E) I.
ComplexMatrix imaginary_shift_normalize(const ComplexMatrix& h, const SpectralOptions& options = {});

/// Solves [C_a, T] = 0 over T = R X R^dagger, X Hermitian and
/// block-diagonal over degenerate eigenvalue clusters. Throws ComplexSpectrum
/// or NotThermalizable.
MetricSolution solve_metric(const GeneralSystem& system, const MetricOptions& options = {});

struct ReducedSystem {
  ComplexMatrix P;
  ComplexMatrix H_R;
  /// P C_a P, acting on the left of the metric.
  std::vector<ComplexMatrix> couplings_R;
  /// P^dagger C_a P^dagger, acting on its right.
  std::vector<ComplexMatrix> couplings_R_dual;
  std::vector<int> retained_modes;
  /// Decomposition of the shifted Hamiltonian; retained modes have Im E = 0 up to rounding.
  BiorthogonalDecomposition basis;
  double shift = 0.0;
};

ReducedSystem max_im_projector(const GeneralSystem& system, const MetricOptions& options = {});

/// Metric on the retained subspace of a reduced system, normalized to unit pseudo-determinant.
MetricSolution solve_reduced_metric(const ReducedSystem& reduced, const MetricOptions& options = {});

/// sum_m (Re E_m - alpha Im E_m) |m>_R <m|_L.
ComplexMatrix h_alpha(const ComplexMatrix& h, double alpha, const SpectralOptions& options = {});

struct ModeProbabilities {
  /// Ascending mode energies.
  RealVector energies;
  RealVector probabilities;
};

/// P_n proportional to exp(-beta E_n) <E_n|_L T_c |E_n>_L. Throws ComplexSpectrum.
ModeProbabilities steady_probabilities(const ComplexMatrix& h, const ComplexMatrix& T_c, double beta,
                                       const MetricOptions& options = {});

/// Same, on an existing decomposition with real parts taken as energies.
ModeProbabilities steady_probabilities(const BiorthogonalDecomposition& basis, const ComplexMatrix& T_c,
                                       double beta);

/// -log(exp(-beta H) T_c) evaluated as -log(S exp(-beta H0) S), S = T_c^{1/2}.
/// Throws NotPositiveDefinite unless T_c is positive-definite and S^-1 H S Hermitian.
ComplexMatrix effective_from_general(const ComplexMatrix& h, const ComplexMatrix& T_c, double beta);

struct Theorem3Result {
  double discrepancy = 0.0;
  std::vector<int> retained_modes;
  /// Per-mode probabilities of the two routes, in the order of the shifted decomposition.
  RealVector reduced_route;
  RealVector alpha_route;
};

/// Compares the reduced-subspace steady state with the one of h_alpha(H, alpha).
Theorem3Result theorem3_check(const GeneralSystem& system, double alpha, double beta,
                              const MetricOptions& options = {});

}  // namespace nhtopo
