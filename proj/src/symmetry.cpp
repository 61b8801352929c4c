#include "nhtopo/symmetry.hpp"

#include <cmath>
#include <numbers>

#include "nhtopo/error.hpp"

namespace nhtopo {

HamiltonianFamily HamiltonianFamily::bloch(std::function<ComplexMatrix(double)> h) {
  return {std::move(h), true};
}

HamiltonianFamily HamiltonianFamily::fixed(ComplexMatrix h) {
  return {[m = std::move(h)](double) { return m; }, false};
}

ComplexMatrix conjugate_spectrum(const ComplexMatrix& h, const SpectralOptions& options) {
  const BiorthogonalDecomposition d = biorthogonal_eigen(h, options);
  return spectral_compose(d, d.eigenvalues.conjugate());
}

namespace {

double threshold_scale(const ComplexMatrix& h) { return std::max(1.0, max_abs(h)); }

ComplexMatrix inverse(const ComplexMatrix& u) { return u.partialPivLu().inverse(); }

void check_shape(const ComplexMatrix& h, const ComplexMatrix& u) {
  if (u.rows() != h.rows() || u.cols() != h.cols())
    throw Error(ErrorKind::InvalidParams, "symmetry operator and Hamiltonian differ in size");
}

}  // namespace

CheckResult check_ordinary(const HamiltonianFamily& family, const ComplexMatrix& unitary, Relation relation,
                           int grid_size) {
  const ComplexMatrix u_inv = inverse(unitary);
  const int points = family.momentum_dependent ? std::max(grid_size, 1) : 1;
  double residual = 0.0;
  double scale = 1.0;
  for (int j = 0; j < points; ++j) {
    const double k = -std::numbers::pi + 2.0 * std::numbers::pi * j / points;
    const ComplexMatrix h = family.at(k);
    const ComplexMatrix h_minus = family.momentum_dependent ? family.at(-k) : h;
    check_shape(h, unitary);
    scale = std::max(scale, threshold_scale(h));
    ComplexMatrix defect;
    switch (relation) {
      case Relation::PHS: defect = unitary * h.transpose() * u_inv + h_minus; break;
      case Relation::TRS: defect = unitary * h.conjugate() * u_inv - h_minus; break;
      case Relation::CS: defect = unitary * h.adjoint() * u_inv + h; break;
      case Relation::SL: defect = unitary * h * u_inv + h; break;
    }
    residual = std::max(residual, max_abs(defect));
  }
  return {residual < kOrdinaryThreshold * scale, residual};
}

CheckResult check_linearized(const ComplexMatrix& h, const ComplexMatrix& unitary, LinearizedKind kind,
                             const SpectralOptions& options) {
  check_shape(h, unitary);
  const ComplexMatrix c = conjugate_spectrum(h, options);
  const ComplexMatrix moved = unitary * h * inverse(unitary);
  const ComplexMatrix defect = kind == LinearizedKind::LTRS ? ComplexMatrix(moved - c.conjugate())
                                                             : ComplexMatrix(moved + c.adjoint());
  const double residual = max_abs(defect);
  return {residual < kLinearizedThreshold * threshold_scale(h), residual};
}

int operator_square(const ComplexMatrix& unitary) {
  const ComplexMatrix sq = unitary * unitary.conjugate();
  const Eigen::Index n = sq.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  if (max_abs(sq - id) <= 1e-10) return 1;
  if (max_abs(sq + id) <= 1e-10) return -1;
  throw Error(ErrorKind::NotSignDefinite, "U U* is not +-identity");
}

SymmetryReport symmetry_report(const ComplexMatrix& h, const SymmetryOperators& ops,
                               const SpectralOptions& options) {
  SymmetryReport report;
  const HamiltonianFamily family = HamiltonianFamily::fixed(h);
  auto ordinary = [&](const std::optional<ComplexMatrix>& op, Relation relation, const char* name) {
    if (!op) return false;
    const CheckResult r = check_ordinary(family, *op, relation);
    report.residuals[name] = r.residual;
    return r.holds;
  };
  auto linearized = [&](const std::optional<ComplexMatrix>& op, LinearizedKind kind, const char* name) {
    if (!op) return false;
    const CheckResult r = check_linearized(h, *op, kind, options);
    report.residuals[name] = r.residual;
    return r.holds;
  };
  report.phs = ordinary(ops.phs, Relation::PHS, "phs");
  report.trs = ordinary(ops.trs, Relation::TRS, "trs");
  report.cs = ordinary(ops.cs, Relation::CS, "cs");
  report.sublattice = ordinary(ops.sublattice, Relation::SL, "sublattice");
  report.ltrs = linearized(ops.ltrs, LinearizedKind::LTRS, "ltrs");
  report.lcs = linearized(ops.lcs, LinearizedKind::LCS, "lcs");
  if (report.phs) report.phs_square = operator_square(*ops.phs);
  if (report.trs) report.trs_square = operator_square(*ops.trs);
  if (report.ltrs) report.ltrs_square = operator_square(*ops.ltrs);
  return report;
}

SymmetryOperators model_operators(int cells) {
  const ComplexMatrix sx = repeat_cells(pauli::x(), cells);
  const ComplexMatrix id = ComplexMatrix::Identity(2 * cells, 2 * cells);
  SymmetryOperators ops;
  ops.phs = sx;
  ops.trs = id;
  ops.cs = sx;
  ops.sublattice = repeat_cells(pauli::z(), cells);
  ops.ltrs = id;
  ops.lcs = sx;
  return ops;
}

const std::vector<ClassRow>& state_class_table() {
  static const std::vector<ClassRow> table = {
      {"A", 0, 0, 0, {"0", "Z", "0"}},
      {"AI*", +1, 0, 0, {"0", "0", "0"}},
      {"AII*", -1, 0, 0, {"0", "Z2", "Z2"}},
      {"AIII*", 0, 0, 1, {"Z", "0", "Z"}},
      {"BDI*", +1, +1, 1, {"Z", "0", "0"}},
      {"CII*", -1, -1, 1, {"Z", "0", "Z2"}},
      {"D", 0, +1, 0, {"Z2", "Z", "0"}},
      {"C", 0, -1, 0, {"0", "Z", "0"}},
      {"DIII*", -1, +1, 1, {"Z2", "Z2", "Z"}},
      {"CI*", +1, -1, 1, {"0", "0", "Z"}},
  };
  return table;
}

ClassLabel classify(const SymmetryReport& report) {
  if ((report.ltrs && !report.ltrs_square) || (report.phs && !report.phs_square))
    throw Error(ErrorKind::InconsistentReport, "symmetry present without operator square");
  const int ltrs = report.ltrs ? *report.ltrs_square : 0;
  const int phs = report.phs ? *report.phs_square : 0;
  const int lcs = report.lcs ? 1 : 0;
  for (const ClassRow& row : state_class_table()) {
    if (row.ltrs != ltrs || row.phs != phs || row.lcs != lcs) continue;
    ClassLabel label;
    label.state_class = row.name;
    label.band_class_of_effective = row.name.back() == '*' ? row.name.substr(0, row.name.size() - 1) : row.name;
    label.invariant_groups = row.groups;
    return label;
  }
  throw Error(ErrorKind::InconsistentReport, "no class with LTRS=" + std::to_string(ltrs) +
                                                 ", PHS=" + std::to_string(phs) + ", LCS=" + std::to_string(lcs));
}

}  // namespace nhtopo
