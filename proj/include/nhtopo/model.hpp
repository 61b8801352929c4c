#pragma once

#include <utility>
#include <vector>

#include "nhtopo/linalg.hpp"

namespace nhtopo {

struct ModelParams {
  double U = 0.0;
  double t = 1.0;
  double J = 1.0;
  double gamma = 0.5;
  /// Temperature; T = 0 selects the zero-temperature limit.
  double T = 1.0;
  int L = 50;

  bool zero_temperature() const { return T == 0.0; }
  double beta() const;
};

/// Throws Error(InvalidParams) unless t >= 0, J > 0, |gamma| < J, T >= 0, L >= 2.
void validate(const ModelParams& params);

enum class BoundaryCondition { Periodic, Open };

/// (U - t cos k) sz + J sin k sy - i gamma sin k sx. A nonzero `sin_shift`
/// replaces sin k by sin k + sin_shift (the non-reciprocal variant).
Mat2 bloch_hamiltonian(const ModelParams& params, double k, double sin_shift = 0.0);

/// Real-space single-particle matrix in the basis (a_1, b_1, ..., a_L, b_L).
ComplexMatrix lattice_hamiltonian(const ModelParams& params, BoundaryCondition bc,
                                  double sin_shift = 0.0);

/// Same matrix for sin_shift = 0, which is real.
RealMatrix lattice_hamiltonian_real(const ModelParams& params, BoundaryCondition bc);

/// Eigenvalue separation of the Bloch Hamiltonian; throws ComplexGap if the radicand is negative.
double band_gap(const ModelParams& params, double k);

/// (-t, +t).
std::pair<double, double> gap_closing_points(const ModelParams& params);

enum class LindbladNormalization {
  /// sqrt(2|gamma|) prefactor with constant 2i|gamma| per site.
  Printed,
  /// sqrt(|gamma|) prefactor with constant i|gamma| per site, which reproduces
  /// the bond amplitude gamma/2 of the Bloch Hamiltonian.
  HalfRate,
};

struct LindbladOptions {
  /// Keep the single-site j = 0 and j = L operators under open boundaries.
  bool include_boundary_terms = true;
  LindbladNormalization normalization = LindbladNormalization::Printed;
};

struct LindbladSet {
  /// Single-particle coefficient vectors, prefactor included.
  std::vector<ComplexVector> operators;
  double prefactor = 0.0;
};

LindbladSet lindblad_operators(const ModelParams& params, BoundaryCondition bc,
                               const LindbladOptions& options = {});

/// max |H_NH - (H_S - (i/2) sum l^dagger l + i prefactor^2 I)|.
double verify_lindblad_consistency(const ModelParams& params, BoundaryCondition bc,
                                   const LindbladOptions& options = {});

}  // namespace nhtopo
