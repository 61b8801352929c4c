#pragma once

#include <utility>
#include <vector>

#include "nhtopo/model.hpp"

namespace nhtopo {

/// S = exp(theta sz) per cell with theta = ln((J+gamma)/(J-gamma)) / 4.
struct SimilarityTransform {
  double theta = 0.0;

  Mat2 bloch() const;
  RealVector lattice_diagonal(int cells) const;
  ComplexMatrix lattice(int cells) const;
};

SimilarityTransform hermitianizing_transform(const ModelParams& params);

/// S^-1 H_NH(k) S = (U - t cos k) sz + sqrt(J^2 - gamma^2) sin k sy.
Mat2 hermitianized_bloch(const ModelParams& params, double k);

/// T_c = S^2.
struct MetricOperator {
  Mat2 bloch;
  ComplexMatrix lattice(int cells) const;
};

MetricOperator metric_operator_model(const ModelParams& params);

struct EffectiveBloch {
  Mat2 matrix;
  double W = 0.0;
  double Ay = 0.0;
  double Az = 0.0;
  /// True at T = 0, where matrix, W and Az hold the limits of H_eff / beta.
  bool rescaled = false;
};

/// Seam between the direct and the asymptotic evaluation, in units of beta * gap / 2.
inline constexpr double kAsymptoticSeam = 30.0;

EffectiveBloch effective_bloch_closed_form(const ModelParams& params, double k);
EffectiveBloch effective_bloch_via_log(const ModelParams& params, double k);

/// Spectral form of -log(S exp(-beta H0) S^dagger) with ascending energies and
/// orthonormal eigenvectors. At beta = infinity the energies are divided by beta.
struct EffectiveSpectrum {
  RealVector energies;
  ComplexMatrix vectors;

  ComplexMatrix matrix() const;
};

/// S is any invertible factor and H0 Hermitian.
EffectiveSpectrum effective_spectrum(const ComplexMatrix& S, const ComplexMatrix& H0, double beta);
EffectiveSpectrum effective_spectrum(const RealMatrix& S, const RealMatrix& H0, double beta);

EffectiveSpectrum effective_lattice_spectrum(const ModelParams& params, BoundaryCondition bc);
ComplexMatrix effective_lattice(const ModelParams& params, BoundaryCondition bc);

/// (T/2) ln((J+gamma)/(J-gamma)) -+ t.
std::pair<double, double> critical_points(const ModelParams& params);

struct DensityProfile {
  std::vector<double> per_cell;
  int N = 0;

  int cells() const { return static_cast<int>(per_cell.size()); }
};

/// Occupies the N lowest effective modes. Throws DegenerateFilling when the
/// N-th and (N+1)-th energies are closer than 1e-10.
DensityProfile density_profile(const ModelParams& params, BoundaryCondition bc, int N);
DensityProfile density_profile(const EffectiveSpectrum& spectrum, int N);

/// max(5, L/10) outermost cells per edge.
int default_edge_window(int cells);

/// Sum over the `window` outermost cells at each edge of (n_cell - N/L).
/// window <= 0 selects default_edge_window.
double edge_accumulation(const DensityProfile& profile, int window = 0);

}  // namespace nhtopo
