#include "nhtopo/model.hpp"

#include <cmath>
#include <limits>

#include "nhtopo/error.hpp"

namespace nhtopo {

double ModelParams::beta() const {
  return T == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / T;
}

void validate(const ModelParams& p) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(p.U) || !finite(p.t) || !finite(p.J) || !finite(p.gamma) || !finite(p.T))
    throw Error(ErrorKind::InvalidParams, "parameters must be finite");
  if (p.t < 0.0) throw Error(ErrorKind::InvalidParams, "t must be non-negative");
  if (p.J <= 0.0) throw Error(ErrorKind::InvalidParams, "J must be positive");
  if (std::abs(p.gamma) >= p.J) throw Error(ErrorKind::InvalidParams, "|gamma| must be less than J");
  if (p.T < 0.0) throw Error(ErrorKind::InvalidParams, "T must be non-negative");
  if (p.L < 2) throw Error(ErrorKind::InvalidParams, "L must be at least 2");
}

Mat2 bloch_hamiltonian(const ModelParams& p, double k, double sin_shift) {
  const double s = std::sin(k) + sin_shift;
  return (p.U - p.t * std::cos(k)) * pauli::z() + p.J * s * pauli::y() - kI * p.gamma * s * pauli::x();
}

namespace {

// sin k = (e^{ik} - e^{-ik}) / 2i and cos k = (e^{ik} + e^{-ik}) / 2, with
// block(j, j+1) carrying the e^{-ik} coefficient.
struct Blocks {
  Mat2 onsite, forward, backward;
};

Blocks blocks(const ModelParams& p, double sin_shift) {
  const Mat2 sin_part = p.J * pauli::y() - kI * p.gamma * pauli::x();
  const Mat2 cos_part = -p.t * pauli::z();
  Blocks b;
  b.onsite = p.U * pauli::z() + sin_shift * sin_part;
  b.forward = cos_part / 2.0 - sin_part / (2.0 * kI);
  b.backward = cos_part / 2.0 + sin_part / (2.0 * kI);
  return b;
}

}  // namespace

ComplexMatrix lattice_hamiltonian(const ModelParams& p, BoundaryCondition bc, double sin_shift) {
  validate(p);
  const Blocks b = blocks(p, sin_shift);
  const int L = p.L;
  ComplexMatrix h = ComplexMatrix::Zero(2 * L, 2 * L);
  for (int j = 0; j < L; ++j) {
    h.block<2, 2>(2 * j, 2 * j) += b.onsite;
    if (j + 1 < L || bc == BoundaryCondition::Periodic) {
      const int next = (j + 1) % L;
      h.block<2, 2>(2 * j, 2 * next) += b.forward;
      h.block<2, 2>(2 * next, 2 * j) += b.backward;
    }
  }
  return h;
}

RealMatrix lattice_hamiltonian_real(const ModelParams& p, BoundaryCondition bc) {
  return lattice_hamiltonian(p, bc).real();
}

double band_gap(const ModelParams& p, double k) {
  const double c = std::cos(k);
  const double radicand =
      p.U * p.U + p.J * p.J - p.gamma * p.gamma + (p.t * p.t - p.J * p.J + p.gamma * p.gamma) * c * c -
      2.0 * p.U * p.t * c;
  if (radicand < 0.0) {
    // Rounding can push an exact zero slightly negative.
    const double scale = p.U * p.U + p.J * p.J + p.t * p.t;
    if (radicand > -1e-14 * scale) return 0.0;
    throw Error(ErrorKind::ComplexGap, "negative radicand in band gap");
  }
  return 2.0 * std::sqrt(radicand);
}

std::pair<double, double> gap_closing_points(const ModelParams& p) { return {-p.t, p.t}; }

LindbladSet lindblad_operators(const ModelParams& p, BoundaryCondition bc, const LindbladOptions& options) {
  validate(p);
  if (p.gamma == 0.0) throw Error(ErrorKind::GammaZero, "Lindblad operators need gamma != 0");
  const int L = p.L;
  const double rate = options.normalization == LindbladNormalization::Printed ? 2.0 * std::abs(p.gamma)
                                                                               : std::abs(p.gamma);
  LindbladSet set;
  set.prefactor = std::sqrt(rate);
  const Complex phase = kI * (p.gamma > 0.0 ? 1.0 : -1.0);

  // Sites are 1-based here; 0 and L+1 are the vanishing open-boundary sites.
  auto index = [&](int site, int sublattice) -> int {
    if (bc == BoundaryCondition::Periodic) site = (site - 1 + L) % L + 1;
    if (site < 1 || site > L) return -1;
    return 2 * (site - 1) + sublattice;
  };
  const int first = bc == BoundaryCondition::Open ? 0 : 1;
  for (int j = first; j <= L; ++j) {
    const bool boundary = bc == BoundaryCondition::Open && (j == 0 || j == L);
    if (boundary && !options.include_boundary_terms) continue;
    for (int kind = 0; kind < 2; ++kind) {
      ComplexVector v = ComplexVector::Zero(2 * L);
      const int own = index(j, kind);
      const int partner = index(j + 1, 1 - kind);
      if (own >= 0) v(own) += set.prefactor;
      if (partner >= 0) v(partner) += set.prefactor * phase;
      set.operators.push_back(std::move(v));
    }
  }
  return set;
}

double verify_lindblad_consistency(const ModelParams& p, BoundaryCondition bc, const LindbladOptions& options) {
  const LindbladSet set = lindblad_operators(p, bc, options);
  const ComplexMatrix h = lattice_hamiltonian(p, bc);
  const Eigen::Index n = h.rows();
  ComplexMatrix jump = ComplexMatrix::Zero(n, n);
  for (const auto& v : set.operators) jump += v.conjugate() * v.transpose();
  const ComplexMatrix rebuilt = hermitian_part(h) - 0.5 * kI * jump +
                                kI * set.prefactor * set.prefactor * ComplexMatrix::Identity(n, n);
  return max_abs(h - rebuilt);
}

}  // namespace nhtopo
