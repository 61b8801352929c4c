#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nhtopo/model.hpp"

namespace nhtopo {

using BlochFamily = std::function<Mat2(double)>;

struct WindingResult {
  int value = 0;
  /// Accumulated phase / 2 pi before rounding.
  double raw = 0.0;
  /// Grid actually used, after any refinement.
  int grid_size = 0;
};

inline constexpr int kDefaultWindingGrid = 2001;

/// Phase winding of det q(k), q the block of H(k) mapping the +1 to the -1
/// eigenspace of `chiral`, over k_j = -pi + 2 pi j / N. Refines the grid x4 (at
/// most twice) when a phase step reaches pi/2.
WindingResult winding_number(const BlochFamily& family, const Mat2& chiral, int grid_size = kDefaultWindingGrid);

/// (1 / 4 pi i) * integral of tr(chiral H^-1 dH/dk), trapezoid rule with a
/// central-difference derivative. Quantized only for Hermitian families.
Complex trace_formula_winding(const BlochFamily& family, const Mat2& chiral, int grid_size = kDefaultWindingGrid);

BlochFamily band_family(const ModelParams& params);
BlochFamily state_family(const ModelParams& params);

WindingResult band_invariant(const ModelParams& params, int grid_size = kDefaultWindingGrid);
WindingResult state_invariant(const ModelParams& params, int grid_size = kDefaultWindingGrid);

struct ZeroModes {
  int count = 0;
  std::vector<Complex> energies;
};

ZeroModes zero_modes(const std::vector<Complex>& spectrum, double tol_abs);

enum class SpectrumKind { Bands, Effective };

struct SpectrumScan {
  std::vector<double> U_values;
  std::vector<std::vector<Complex>> eigenvalues;
  std::vector<int> zero_mode_count;
  std::vector<double> zero_mode_tol;
};

struct ScanOptions {
  /// Zero-mode tolerance relative to the spectral radius (bands) or the
  /// effective bandwidth.
  double zero_mode_rel_tol = 1e-3;
  int threads = 1;
};

/// Eigenvalues sorted by real part, then imaginary part.
std::vector<Complex> lattice_spectrum(const ModelParams& params, BoundaryCondition bc, SpectrumKind which);

/// Scale that multiplies zero_mode_rel_tol for a given spectrum.
double zero_mode_scale(const std::vector<Complex>& spectrum, SpectrumKind which);

SpectrumScan spectrum_scan(const ModelParams& base, const std::vector<double>& U_values, BoundaryCondition bc,
                           SpectrumKind which, const ScanOptions& options = {});

struct PhasePoint {
  double U = 0.0;
  double gamma = 0.0;
  int W = 0;
  int w = 0;
  std::string region;
};

/// (W, w) = (0,0) I, (0,1) II, (1,0) III, (1,1) IV.
std::string region_label(int W, int w);

/// Throws OnBoundary within `boundary_tol` of U = +-t or U = U_c+-.
PhasePoint region(const ModelParams& params, int grid_size = kDefaultWindingGrid, double boundary_tol = 1e-9);

}  // namespace nhtopo
