#include "nhtopo/statmech.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nhtopo/effective_state.hpp"
#include "nhtopo/error.hpp"

namespace nhtopo {

namespace {

double spectral_radius(const BiorthogonalDecomposition& d) {
  return d.size() == 0 ? 0.0 : d.eigenvalues.cwiseAbs().maxCoeff();
}

double max_abs_imag(const BiorthogonalDecomposition& d) {
  return d.size() == 0 ? 0.0 : d.eigenvalues.imag().cwiseAbs().maxCoeff();
}

void require_real(const BiorthogonalDecomposition& d, double real_tol) {
  if (max_abs_imag(d) > real_tol * std::max(1.0, spectral_radius(d)))
    throw Error(ErrorKind::ComplexSpectrum, "spectrum has nonzero imaginary parts");
}

// One real parameter of the Hermitian mode-frame matrix X.
struct Entry {
  int row, col;
  Complex value;
};
using Parameter = std::vector<Entry>;

std::vector<Parameter> parameters_for(const std::vector<std::vector<int>>& clusters) {
  std::vector<Parameter> params;
  for (const auto& cluster : clusters) {
    for (std::size_t i = 0; i < cluster.size(); ++i) {
      const int a = cluster[i];
      params.push_back({{a, a, 1.0}});
      for (std::size_t j = i + 1; j < cluster.size(); ++j) {
        const int b = cluster[j];
        params.push_back({{a, b, 1.0}, {b, a, 1.0}});
        params.push_back({{a, b, kI}, {b, a, -kI}});
      }
    }
  }
  return params;
}

ComplexMatrix assemble_x(const std::vector<Parameter>& params, const RealVector& x, Eigen::Index n) {
  ComplexMatrix X = ComplexMatrix::Zero(n, n);
  for (std::size_t p = 0; p < params.size(); ++p)
    for (const Entry& e : params[p]) X(e.row, e.col) += x(static_cast<Eigen::Index>(p)) * e.value;
  return X;
}

// Entries of C~ X_p - X_p D~ as real rows, for a constraint A T = T B written in
// the mode frame: C~ = L^dagger A R, D~ = R^dagger B L.
RealMatrix constraint_block(const ComplexMatrix& c_mode, const ComplexMatrix& d_mode,
                            const std::vector<Parameter>& params) {
  const Eigen::Index n = c_mode.rows();
  RealMatrix block(2 * n * n, static_cast<Eigen::Index>(params.size()));
  ComplexMatrix e(n, n);
  for (std::size_t p = 0; p < params.size(); ++p) {
    e.setZero();
    for (const Entry& entry : params[p]) {
      e.col(entry.col) += c_mode.col(entry.row) * entry.value;
      e.row(entry.row) -= entry.value * d_mode.row(entry.col);
    }
    const auto col = static_cast<Eigen::Index>(p);
    block.col(col).head(n * n) = e.real().reshaped();
    block.col(col).tail(n * n) = e.imag().reshaped();
  }
  return block;
}

struct Nullspace {
  RealMatrix basis;
};

// Constraint pairs: left[a] T - T right[a] = 0.
Nullspace constraint_nullspace(const BiorthogonalDecomposition& d, const std::vector<ComplexMatrix>& left,
                               const std::vector<ComplexMatrix>& right, const std::vector<Parameter>& params,
                               double null_tol) {
  const auto P = static_cast<Eigen::Index>(params.size());
  const Eigen::Index n = d.right.rows();
  RealMatrix r_factor(0, P);
  double scale = 0.0;
  for (std::size_t a = 0; a < left.size(); ++a) {
    if (left[a].rows() != n || left[a].cols() != n)
      throw Error(ErrorKind::InvalidParams, "coupling dimension differs from H");
    const ComplexMatrix c_mode = d.left.adjoint() * left[a] * d.right;
    const ComplexMatrix d_mode = d.right.adjoint() * right[a] * d.left;
    scale = std::max({scale, max_abs(c_mode), max_abs(d_mode)});
    RealMatrix stacked(r_factor.rows() + 2 * n * n, P);
    stacked << r_factor, constraint_block(c_mode, d_mode, params);
    Eigen::HouseholderQR<RealMatrix> qr(stacked);
    const Eigen::Index keep = std::min(P, stacked.rows());
    r_factor = qr.matrixQR().topRows(keep).triangularView<Eigen::Upper>();
  }
  Nullspace out;
  if (r_factor.rows() == 0) {
    out.basis = RealMatrix::Identity(P, P);
    return out;
  }
  Eigen::BDCSVD<RealMatrix> svd(r_factor, Eigen::ComputeFullV);
  const RealVector& sigma = svd.singularValues();
  // Relative to the couplings, so that a vanishing constraint block is not read as rank.
  const double cutoff = null_tol * std::max(sigma(0), scale);
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff && sigma(rank) > 0.0) ++rank;
  out.basis = svd.matrixV().rightCols(P - rank);
  return out;
}

// Sign-fixes x so that X is positive-definite on the modes; false if impossible.
bool make_positive(const std::vector<Parameter>& params, const std::vector<std::vector<int>>& clusters,
                   RealVector& x, Eigen::Index n) {
  const ComplexMatrix X = assemble_x(params, x, n);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& cluster : clusters) {
    const auto m = static_cast<Eigen::Index>(cluster.size());
    ComplexMatrix block(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) block(i, j) = X(cluster[i], cluster[j]);
    const RealVector ev = hermitian_eigen(block).values;
    lo = std::min(lo, ev.minCoeff());
    hi = std::max(hi, ev.maxCoeff());
  }
  const double scale = std::max(std::abs(lo), std::abs(hi));
  const double eps = 1e-12 * scale;
  if (lo > eps) return true;
  if (hi < -eps) {
    x = -x;
    return true;
  }
  return false;
}

struct ModeSolve {
  ComplexMatrix T;
  RealVector weights;
  int nullspace_dim = 0;
  bool non_unique = false;
};

ModeSolve solve_on_modes(const BiorthogonalDecomposition& d, const std::vector<std::vector<int>>& clusters,
                         const std::vector<ComplexMatrix>& left, const std::vector<ComplexMatrix>& right,
                         double null_tol) {
  const Eigen::Index n = d.right.rows();
  const std::vector<Parameter> params = parameters_for(clusters);
  const Nullspace null = constraint_nullspace(d, left, right, params, null_tol);
  ModeSolve out;
  out.nullspace_dim = static_cast<int>(null.basis.cols());
  if (out.nullspace_dim == 0) throw Error(ErrorKind::NotThermalizable, "constraint nullspace is empty");

  RealVector x = null.basis.col(0);
  if (out.nullspace_dim > 1) {
    out.non_unique = true;
    // Prefer the component of X = identity inside the nullspace.
    RealVector identity = RealVector::Zero(static_cast<Eigen::Index>(params.size()));
    for (std::size_t p = 0; p < params.size(); ++p)
      if (params[p].size() == 1) identity(static_cast<Eigen::Index>(p)) = 1.0;
    RealVector projected = null.basis * (null.basis.transpose() * identity);
    if (projected.norm() > 1e-8 * identity.norm() && make_positive(params, clusters, projected, n))
      x = projected;
  }
  if (!make_positive(params, clusters, x, n))
    throw Error(ErrorKind::NotThermalizable, "admissible metric is not sign-definite");

  const ComplexMatrix X = assemble_x(params, x, n);
  out.T = hermitian_part(d.right * X * d.right.adjoint());
  out.weights = X.diagonal().real();
  return out;
}

// Scales to unit product of the `rank` largest eigenvalues.
void normalize_pseudo_determinant(ModeSolve& solve, Eigen::Index rank) {
  const RealVector ev = hermitian_eigen(solve.T).values;
  double log_det = 0.0;
  for (Eigen::Index i = ev.size() - rank; i < ev.size(); ++i) {
    if (ev(i) <= 0.0) throw Error(ErrorKind::NotThermalizable, "metric lost positivity");
    log_det += std::log(ev(i));
  }
  const double factor = std::exp(-log_det / static_cast<double>(rank));
  solve.T *= factor;
  solve.weights *= factor;
}

double coupling_residual(const ComplexMatrix& T, const std::vector<ComplexMatrix>& left,
                         const std::vector<ComplexMatrix>& right) {
  double r = 0.0;
  for (std::size_t a = 0; a < left.size(); ++a) r = std::max(r, max_abs(left[a] * T - T * right[a]));
  return r;
}

MetricSolution finish(ModeSolve solve, const BiorthogonalDecomposition& d, const ComplexMatrix& h,
                      const std::vector<ComplexMatrix>& left, const std::vector<ComplexMatrix>& right, bool full) {
  MetricSolution out;
  out.T_c = std::move(solve.T);
  out.mode_weights = std::move(solve.weights);
  out.basis = d;
  out.nullspace_dim = solve.nullspace_dim;
  out.non_unique = solve.non_unique;
  out.residuals["conjugacy"] = max_abs(h * out.T_c - out.T_c * h.adjoint());
  out.residuals["undaggered"] = max_abs(h * out.T_c - out.T_c * h);
  out.residuals["coupling"] = coupling_residual(out.T_c, left, right);
  if (full) {
    const ComplexMatrix log_t = hermitian_function(out.T_c, [](double v) { return std::log(v); });
    double r = 0.0;
    for (const ComplexMatrix& c : left) r = std::max(r, max_abs(log_t * c - c * log_t));
    out.residuals["log_commutator"] = r;
  }
  return out;
}

}  // namespace

ComplexMatrix imaginary_shift_normalize(const ComplexMatrix& h, const SpectralOptions& options) {
  const BiorthogonalDecomposition d = biorthogonal_eigen(h, options);
  const double top = d.eigenvalues.imag().maxCoeff();
  return h - kI * top * ComplexMatrix::Identity(h.rows(), h.cols());
}

MetricSolution solve_metric(const GeneralSystem& system, const MetricOptions& options) {
  const BiorthogonalDecomposition d = biorthogonal_eigen(system.H, options.spectral);
  require_real(d, options.real_tol);
  ModeSolve solve = solve_on_modes(d, d.clusters, system.couplings, system.couplings, options.null_tol);
  normalize_pseudo_determinant(solve, d.size());
  return finish(std::move(solve), d, system.H, system.couplings, system.couplings, true);
}

ReducedSystem max_im_projector(const GeneralSystem& system, const MetricOptions& options) {
  const BiorthogonalDecomposition original = biorthogonal_eigen(system.H, options.spectral);
  ReducedSystem out;
  out.shift = original.eigenvalues.imag().maxCoeff();
  const Eigen::Index n = system.H.rows();
  const ComplexMatrix shifted = system.H - kI * out.shift * ComplexMatrix::Identity(n, n);
  out.basis = original;
  out.basis.eigenvalues.array() -= kI * out.shift;
  const double tol = options.max_im_tol * std::max(1.0, spectral_radius(original));
  ComplexVector select = ComplexVector::Zero(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    if (out.basis.eigenvalues(m).imag() >= -tol) {
      out.retained_modes.push_back(static_cast<int>(m));
      select(m) = 1.0;
    }
  }
  out.P = spectral_compose(out.basis, select);
  out.H_R = out.P * shifted * out.P;
  const ComplexMatrix P_adj = out.P.adjoint();
  for (const ComplexMatrix& c : system.couplings) {
    out.couplings_R.push_back(out.P * c * out.P);
    out.couplings_R_dual.push_back(P_adj * c * P_adj);
  }
  return out;
}

MetricSolution solve_reduced_metric(const ReducedSystem& reduced, const MetricOptions& options) {
  // Retained clusters only; a cluster never mixes retained and lost modes
  // because their imaginary parts differ by more than the clustering radius.
  std::vector<std::vector<int>> clusters;
  for (const auto& cluster : reduced.basis.clusters) {
    std::vector<int> kept;
    for (int m : cluster)
      if (std::find(reduced.retained_modes.begin(), reduced.retained_modes.end(), m) !=
          reduced.retained_modes.end())
        kept.push_back(m);
    if (!kept.empty()) clusters.push_back(std::move(kept));
  }
  ModeSolve solve =
      solve_on_modes(reduced.basis, clusters, reduced.couplings_R, reduced.couplings_R_dual, options.null_tol);
  normalize_pseudo_determinant(solve, static_cast<Eigen::Index>(reduced.retained_modes.size()));
  return finish(std::move(solve), reduced.basis, reduced.H_R, reduced.couplings_R, reduced.couplings_R_dual, false);
}

ComplexMatrix h_alpha(const ComplexMatrix& h, double alpha, const SpectralOptions& options) {
  const BiorthogonalDecomposition d = biorthogonal_eigen(h, options);
  const ComplexVector values =
      (d.eigenvalues.real() - alpha * d.eigenvalues.imag()).cast<Complex>();
  return spectral_compose(d, values);
}

namespace {

// Probabilities in decomposition order; the energy offset is taken over
// modes with positive weight so that zero-weight modes cannot underflow the rest.
RealVector mode_probabilities(const BiorthogonalDecomposition& d, const ComplexMatrix& T_c, double beta) {
  const Eigen::Index n = d.size();
  RealVector weights(n);
  for (Eigen::Index m = 0; m < n; ++m) weights(m) = d.left.col(m).dot(T_c * d.left.col(m)).real();
  const double cutoff = 1e-14 * std::max(weights.cwiseAbs().maxCoeff(), 1e-300);
  double lowest = std::numeric_limits<double>::infinity();
  for (Eigen::Index m = 0; m < n; ++m)
    if (weights(m) > cutoff) lowest = std::min(lowest, d.eigenvalues(m).real());
  if (!std::isfinite(lowest)) throw Error(ErrorKind::NotPositiveDefinite, "metric has no positive mode weight");
  RealVector p(n);
  for (Eigen::Index m = 0; m < n; ++m)
    p(m) = weights(m) > cutoff ? std::exp(-beta * (d.eigenvalues(m).real() - lowest)) * weights(m) : 0.0;
  return p / p.sum();
}

}  // namespace

ModeProbabilities steady_probabilities(const BiorthogonalDecomposition& d, const ComplexMatrix& T_c, double beta) {
  const Eigen::Index n = d.size();
  const RealVector p = mode_probabilities(d, T_c, beta);
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return d.eigenvalues(a).real() < d.eigenvalues(b).real(); });
  ModeProbabilities out;
  out.energies.resize(n);
  out.probabilities.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.energies(i) = d.eigenvalues(order[i]).real();
    out.probabilities(i) = p(order[i]);
  }
  return out;
}

ModeProbabilities steady_probabilities(const ComplexMatrix& h, const ComplexMatrix& T_c, double beta,
                                       const MetricOptions& options) {
  const BiorthogonalDecomposition d = biorthogonal_eigen(h, options.spectral);
  require_real(d, options.real_tol);
  return steady_probabilities(d, T_c, beta);
}

ComplexMatrix effective_from_general(const ComplexMatrix& h, const ComplexMatrix& T_c, double beta) {
  if (max_abs(T_c - T_c.adjoint()) > 1e-10 * std::max(1.0, max_abs(T_c)))
    throw Error(ErrorKind::NotPositiveDefinite, "metric is not Hermitian");
  const HermitianSpectrum t = hermitian_eigen(T_c);
  if (t.values.minCoeff() <= 0.0) throw Error(ErrorKind::NotPositiveDefinite, "metric is not positive-definite");
  const RealVector root = t.values.cwiseSqrt();
  const ComplexMatrix S = t.vectors * root.cast<Complex>().asDiagonal() * t.vectors.adjoint();
  const ComplexMatrix S_inv = t.vectors * root.cwiseInverse().cast<Complex>().asDiagonal() * t.vectors.adjoint();
  const ComplexMatrix h0 = S_inv * h * S;
  if (max_abs(h0 - h0.adjoint()) > 1e-8 * std::max(1.0, max_abs(h0)))
    throw Error(ErrorKind::NotPositiveDefinite, "T_c^{-1/2} H T_c^{1/2} is not Hermitian");
  return effective_spectrum(S, hermitian_part(h0), beta).matrix();
}

Theorem3Result theorem3_check(const GeneralSystem& system, double alpha, double beta, const MetricOptions& options) {
  const ReducedSystem reduced = max_im_projector(system, options);
  const MetricSolution route_a = solve_reduced_metric(reduced, options);
  const RealVector pa = mode_probabilities(reduced.basis, route_a.T_c, beta);

  const ComplexMatrix ha = h_alpha(system.H, alpha, options.spectral);
  const MetricSolution route_b = solve_metric({ha, system.couplings}, options);
  const RealVector pb = mode_probabilities(route_b.basis, route_b.T_c, beta);

  // Route B has its own mode order; match through Re E - alpha Im E.
  const Eigen::Index n = reduced.basis.size();
  Theorem3Result out;
  out.retained_modes = reduced.retained_modes;
  out.reduced_route = RealVector::Zero(n);
  out.alpha_route = RealVector::Zero(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const Complex e = reduced.basis.eigenvalues(m) + kI * reduced.shift;
    Eigen::Index best = 0;
    (route_b.basis.eigenvalues.array() - Complex(e.real() - alpha * e.imag(), 0.0)).abs().minCoeff(&best);
    out.alpha_route(m) = pb(best);
    out.reduced_route(m) = pa(m);
  }
  out.discrepancy = (out.reduced_route - out.alpha_route).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace nhtopo
