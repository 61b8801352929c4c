#include "nhtopo/effective_state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nhtopo/error.hpp"

namespace nhtopo {

namespace {

double metric_log(const ModelParams& p) { return std::log((p.J + p.gamma) / (p.J - p.gamma)); }

Mat2 diag2(double a, double b) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

Mat2 SimilarityTransform::bloch() const { return diag2(std::exp(theta), std::exp(-theta)); }

RealVector SimilarityTransform::lattice_diagonal(int cells) const {
  RealVector d(2 * cells);
  for (int j = 0; j < cells; ++j) {
    d(2 * j) = std::exp(theta);
    d(2 * j + 1) = std::exp(-theta);
  }
  return d;
}

ComplexMatrix SimilarityTransform::lattice(int cells) const { return repeat_cells(bloch(), cells); }

SimilarityTransform hermitianizing_transform(const ModelParams& p) {
  validate(p);
  return {metric_log(p) / 4.0};
}

Mat2 hermitianized_bloch(const ModelParams& p, double k) {
  validate(p);
  const double a = std::sqrt((p.J - p.gamma) * (p.J + p.gamma));
  return (p.U - p.t * std::cos(k)) * pauli::z() + a * std::sin(k) * pauli::y();
}

ComplexMatrix MetricOperator::lattice(int cells) const { return repeat_cells(bloch, cells); }

MetricOperator metric_operator_model(const ModelParams& p) {
  validate(p);
  const double r = std::sqrt((p.J + p.gamma) / (p.J - p.gamma));
  return {diag2(r, 1.0 / r)};
}

EffectiveBloch effective_bloch_closed_form(const ModelParams& p, double k) {
  validate(p);
  const double J = p.J;
  const double g = p.gamma;
  const double s = std::sin(k);
  const double u = p.U - p.t * std::cos(k);
  const double a = std::sqrt((J - g) * (J + g));
  const double gap = band_gap(p, k);

  EffectiveBloch out;
  out.Ay = s * a * a / J;

  // J + g' and J - g' with g' = 2 gamma (t cos k - U) / gap, |g'| <= |gamma|.
  // The smaller one is J - |gamma| h, h = 2|u| / gap, written without cancellation.
  double j_plus = J, j_minus = J;
  if (gap > 0.0) {
    const double h = 2.0 * std::abs(u) / gap;
    const double one_minus_h = 4.0 * a * a * s * s / (gap * (gap + 2.0 * std::abs(u)));
    const double small = (J - std::abs(g)) + std::abs(g) * one_minus_h;
    const double large = J + std::abs(g) * h;
    const bool g_prime_negative = g * u > 0.0;
    j_plus = g_prime_negative ? small : large;
    j_minus = g_prime_negative ? large : small;
  }

  if (p.zero_temperature()) {
    out.rescaled = true;
    out.W = gap / 2.0;
    out.Az = u - g / (2.0 * J) * gap;
  } else {
    const double x = p.beta() * gap / 2.0;
    if (x > kAsymptoticSeam) {
      out.W = x + std::log((j_plus + j_minus * std::exp(-2.0 * x)) / a);
      out.Az = u - g / (2.0 * J) * gap;
    } else {
      const double y = (j_plus * std::exp(x) + j_minus * std::exp(-x)) / (2.0 * a);
      out.W = std::acosh(std::max(y, 1.0));
      // gap / tanh(x) -> 2 / beta as the gap closes.
      const double coth_term = x > 0.0 ? gap / std::tanh(x) : 2.0 / p.beta();
      out.Az = u - g / (2.0 * J) * coth_term;
    }
  }

  const double norm = std::hypot(out.Ay, out.Az);
  if (norm == 0.0) {
    if (out.W > 1e-6) throw Error(ErrorKind::Degenerate, "A_y = A_z = 0 with nonzero W");
    out.matrix = Mat2::Zero();
    return out;
  }
  out.matrix = out.W / norm * (out.Ay * pauli::y() + out.Az * pauli::z());
  return out;
}

ComplexMatrix EffectiveSpectrum::matrix() const {
  return vectors * energies.cast<Complex>().asDiagonal() * vectors.adjoint();
}

namespace {

template <typename Scalar>
using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
EffectiveSpectrum effective_spectrum_impl(const Dense<Scalar>& S, const Dense<Scalar>& H0, double beta) {
  const Eigen::Index n = H0.rows();
  Eigen::SelfAdjointEigenSolver<Dense<Scalar>> solver((H0 + H0.adjoint()) / 2.0);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::NotPositiveDefinite, "eigensolver failed on the Hermitianized matrix");
  const RealVector& E = solver.eigenvalues();
  Dense<Scalar> B = S * solver.eigenvectors();

  EffectiveSpectrum out;
  if (std::isinf(beta)) {
    // Ground-state limit: Gram-Schmidt of S v_i in ascending energy order.
    Eigen::HouseholderQR<Dense<Scalar>> qr(B);
    Dense<Scalar> Q = qr.householderQ() * Dense<Scalar>::Identity(n, n);
    out.energies = E;
    out.vectors = Q.template cast<Complex>();
    return out;
  }

  GradedGram<Scalar> gram = orthogonalize_graded<Scalar>(std::move(B), RealVector(-beta * E / 2.0));
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index i, Eigen::Index j) { return gram.log_scale(i) > gram.log_scale(j); });
  out.energies.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    out.energies(c) = -2.0 * gram.log_scale(order[c]);
    out.vectors.col(c) = gram.vectors.col(order[c]).template cast<Complex>();
  }
  return out;
}

}  // namespace

EffectiveSpectrum effective_spectrum(const ComplexMatrix& S, const ComplexMatrix& H0, double beta) {
  return effective_spectrum_impl<Complex>(S, H0, beta);
}

EffectiveSpectrum effective_spectrum(const RealMatrix& S, const RealMatrix& H0, double beta) {
  return effective_spectrum_impl<double>(S, H0, beta);
}

EffectiveBloch effective_bloch_via_log(const ModelParams& p, double k) {
  const SimilarityTransform S = hermitianizing_transform(p);
  const EffectiveSpectrum spectrum =
      effective_spectrum(ComplexMatrix(S.bloch()), ComplexMatrix(hermitianized_bloch(p, k)), p.beta());
  EffectiveBloch out;
  out.matrix = spectrum.matrix();
  out.rescaled = p.zero_temperature();
  // Components read back from the traceless matrix: (W/|A|) (Ay sy + Az sz).
  out.W = (spectrum.energies(1) - spectrum.energies(0)) / 2.0;
  out.Ay = out.matrix(1, 0).imag();
  out.Az = out.matrix(0, 0).real();
  return out;
}

EffectiveSpectrum effective_lattice_spectrum(const ModelParams& p, BoundaryCondition bc) {
  const SimilarityTransform S = hermitianizing_transform(p);
  const RealVector d = S.lattice_diagonal(p.L);
  const RealMatrix h = lattice_hamiltonian_real(p, bc);
  const RealMatrix h0 = d.cwiseInverse().asDiagonal() * h * d.asDiagonal();
  return effective_spectrum(RealMatrix(d.asDiagonal()), h0, p.beta());
}

ComplexMatrix effective_lattice(const ModelParams& p, BoundaryCondition bc) {
  return effective_lattice_spectrum(p, bc).matrix();
}

std::pair<double, double> critical_points(const ModelParams& p) {
  validate(p);
  const double center = p.zero_temperature() ? 0.0 : p.T / 2.0 * metric_log(p);
  return {center - p.t, center + p.t};
}

DensityProfile density_profile(const EffectiveSpectrum& spectrum, int N) {
  const Eigen::Index n = spectrum.energies.size();
  if (N < 0 || N > n) throw Error(ErrorKind::InvalidParams, "particle number out of range");
  if (N > 0 && N < n && spectrum.energies(N) - spectrum.energies(N - 1) < 1e-10)
    throw Error(ErrorKind::DegenerateFilling, "N-th and (N+1)-th effective energies coincide");
  DensityProfile profile;
  profile.N = N;
  profile.per_cell.assign(n / 2, 0.0);
  for (Eigen::Index m = 0; m < N; ++m)
    for (Eigen::Index i = 0; i < n; ++i) profile.per_cell[i / 2] += std::norm(spectrum.vectors(i, m));
  return profile;
}

DensityProfile density_profile(const ModelParams& p, BoundaryCondition bc, int N) {
  if (p.zero_temperature()) throw Error(ErrorKind::InvalidParams, "density profile needs T > 0");
  return density_profile(effective_lattice_spectrum(p, bc), N);
}

int default_edge_window(int cells) { return std::max(5, cells / 10); }

double edge_accumulation(const DensityProfile& profile, int window) {
  const int L = profile.cells();
  if (window <= 0) window = default_edge_window(L);
  window = std::min(window, L / 2);
  const double mean = static_cast<double>(profile.N) / L;
  double total = 0.0;
  for (int c = 0; c < window; ++c)
    total += (profile.per_cell[c] - mean) + (profile.per_cell[L - 1 - c] - mean);
  return total;
}

}  // namespace nhtopo
