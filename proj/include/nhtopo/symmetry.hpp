#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nhtopo/linalg.hpp"
#include "nhtopo/model.hpp"

namespace nhtopo {

enum class MomentumAction { Preserve, Reverse };

struct SymmetryOp {
  ComplexMatrix unitary;
  /// Complex conjugation accompanies the unitary.
  bool antiunitary = false;
  MomentumAction momentum = MomentumAction::Preserve;
};

/// Either a Bloch family H(k) sampled on a grid, or a single real-space matrix
/// for which H(-k) is read as H.
struct HamiltonianFamily {
  std::function<ComplexMatrix(double)> at;
  bool momentum_dependent = false;

  static HamiltonianFamily bloch(std::function<ComplexMatrix(double)> h);
  static HamiltonianFamily fixed(ComplexMatrix h);
};

enum class Relation { PHS, TRS, CS, SL };
enum class LinearizedKind { LTRS, LCS };

struct CheckResult {
  bool holds = false;
  double residual = 0.0;
};

inline constexpr double kOrdinaryThreshold = 1e-10;
inline constexpr double kLinearizedThreshold = 1e-8;

/// sum_m conj(E_m) |m>_R <m|_L.
ComplexMatrix conjugate_spectrum(const ComplexMatrix& h, const SpectralOptions& options = {});

/// PHS: U H^T(k) U^-1 + H(-k); TRS: U H*(k) U^-1 - H(-k); CS: U H^dagger(k) U^-1 + H(k);
/// SL: U H(k) U^-1 + H(k). Max entry over a uniform grid of `grid_size` momenta.
CheckResult check_ordinary(const HamiltonianFamily& family, const ComplexMatrix& unitary, Relation relation,
                           int grid_size = 64);

/// LTRS: T H T^-1 - C(H)*; LCS: Gamma H Gamma^-1 + C(H)^dagger.
CheckResult check_linearized(const ComplexMatrix& h, const ComplexMatrix& unitary, LinearizedKind kind,
                             const SpectralOptions& options = {});

/// Sign of U U* for the antiunitary U K; throws NotSignDefinite unless U U* = +-1.
int operator_square(const ComplexMatrix& unitary);

struct SymmetryReport {
  bool phs = false;
  bool trs = false;
  bool cs = false;
  bool sublattice = false;
  bool ltrs = false;
  bool lcs = false;
  std::optional<int> trs_square;
  std::optional<int> ltrs_square;
  std::optional<int> phs_square;
  std::map<std::string, double> residuals;
};

/// Operators to test; absent entries count as missing symmetries.
struct SymmetryOperators {
  std::optional<ComplexMatrix> phs;
  std::optional<ComplexMatrix> trs;
  std::optional<ComplexMatrix> cs;
  std::optional<ComplexMatrix> sublattice;
  std::optional<ComplexMatrix> ltrs;
  std::optional<ComplexMatrix> lcs;
};

SymmetryReport symmetry_report(const ComplexMatrix& h, const SymmetryOperators& ops,
                               const SpectralOptions& options = {});

/// PHS and chiral operators act as sx per cell, time reversal as plain conjugation,
/// sublattice as sz per cell.
SymmetryOperators model_operators(int cells);

struct ClassLabel {
  std::string state_class;
  std::string band_class_of_effective;
  std::array<std::string, 3> invariant_groups;
};

struct ClassRow {
  std::string name;
  int ltrs;
  int phs;
  int lcs;
  std::array<std::string, 3> groups;
};

const std::vector<ClassRow>& state_class_table();

/// Throws InconsistentReport when the (LTRS, PHS, LCS) triple matches no row.
ClassLabel classify(const SymmetryReport& report);

}  // namespace nhtopo
