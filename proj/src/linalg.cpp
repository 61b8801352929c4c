#include "nhtopo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nhtopo/error.hpp"

namespace nhtopo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::GammaZero: return "GammaZero";
    case ErrorKind::ComplexGap: return "ComplexGap";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DegenerateFilling: return "DegenerateFilling";
    case ErrorKind::Defective: return "Defective";
    case ErrorKind::NotSignDefinite: return "NotSignDefinite";
    case ErrorKind::InconsistentReport: return "InconsistentReport";
    case ErrorKind::GapClosed: return "GapClosed";
    case ErrorKind::NotChiral: return "NotChiral";
    case ErrorKind::OnBoundary: return "OnBoundary";
    case ErrorKind::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorKind::NotThermalizable: return "NotThermalizable";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

namespace pauli {
Mat2 x() {
  Mat2 m;
  m << 0, 1, 1, 0;
  return m;
}
Mat2 y() {
  Mat2 m;
  m << 0, -kI, kI, 0;
  return m;
}
Mat2 z() {
  Mat2 m;
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

ComplexMatrix repeat_cells(const Mat2& block, int cells) {
  ComplexMatrix out = ComplexMatrix::Zero(2 * cells, 2 * cells);
  for (int j = 0; j < cells; ++j) out.block<2, 2>(2 * j, 2 * j) = block;
  return out;
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  return (a + a.adjoint()) / 2.0;
}

namespace {

ComplexMatrix random_hermitian(Eigen::Index n, double size, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ComplexMatrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  ComplexMatrix h = hermitian_part(g);
  return h * (size / std::max(max_abs(h), 1e-300));
}

std::vector<std::vector<int>> cluster_eigenvalues(const ComplexVector& values, double radius) {
  const int n = static_cast<int>(values.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(values(i) - values(j)) <= radius) parent[find(i)] = find(j);
  std::vector<std::vector<int>> groups(n);
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<int>> clusters;
  for (auto& g : groups)
    if (!g.empty()) clusters.push_back(std::move(g));
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return clusters;
}

}  // namespace

BiorthogonalDecomposition biorthogonal_eigen(const ComplexMatrix& h_in, const SpectralOptions& options) {
  if (h_in.rows() != h_in.cols()) throw Error(ErrorKind::InvalidParams, "matrix must be square");
  const Eigen::Index n = h_in.rows();
  ComplexMatrix h = h_in;
  if (options.perturb_exceptional)
    h += random_hermitian(n, 1e-10 * std::max(1.0, max_abs(h_in)), 0x5eed);

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(h, true);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::Defective, "eigensolver did not converge");

  BiorthogonalDecomposition out;
  out.eigenvalues = solver.eigenvalues();
  out.right = solver.eigenvectors();
  const double scale = std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());
  out.clusters = cluster_eigenvalues(out.eigenvalues, options.degeneracy_tol * scale);

  // Near-coincident eigenvalues get an orthonormal basis of the approximate
  // null space of (H - mean), which the eigensolver does not guarantee.
  for (const auto& cluster : out.clusters) {
    const auto m = static_cast<Eigen::Index>(cluster.size());
    if (m < 2) continue;
    Complex mean = 0.0;
    for (int i : cluster) mean += out.eigenvalues(i);
    mean /= static_cast<double>(m);
    ComplexMatrix shifted = h - mean * ComplexMatrix::Identity(n, n);
    Eigen::BDCSVD<ComplexMatrix> svd(shifted, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    if (sigma(n - m) > std::sqrt(options.degeneracy_tol) * scale)
      throw Error(ErrorKind::Defective, "degenerate eigenvalue without a complete eigenspace");
    for (Eigen::Index c = 0; c < m; ++c) out.right.col(cluster[c]) = svd.matrixV().col(n - m + c);
  }

  for (Eigen::Index c = 0; c < n; ++c) out.right.col(c).normalize();
  Eigen::BDCSVD<ComplexMatrix> svd(out.right);
  const auto& sigma = svd.singularValues();
  out.condition = sigma(0) / sigma(n - 1);
  if (!std::isfinite(out.condition) || out.condition > 1.0 / options.degeneracy_tol)
    throw Error(ErrorKind::Defective, "eigenvector matrix condition number " + std::to_string(out.condition));
  out.left = out.right.partialPivLu().inverse().adjoint();
  return out;
}

ComplexMatrix spectral_compose(const BiorthogonalDecomposition& d, const ComplexVector& values) {
  return d.right * values.asDiagonal() * d.left.adjoint();
}

HermitianSpectrum hermitian_eigen(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(h));
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::NotPositiveDefinite, "Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

template <typename Scalar>
Scalar unit_phase(Scalar p) {
  const double a = std::abs(p);
  return a == 0.0 ? Scalar(1.0) : p / a;
}

double conj_if(double x) { return x; }
Complex conj_if(Complex x) { return std::conj(x); }

}  // namespace

template <typename Scalar>
GradedGram<Scalar> orthogonalize_graded(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> x,
                                        RealVector ell) {
  const Eigen::Index n = x.cols();
  for (Eigen::Index c = 0; c < n; ++c) {
    const double norm = x.col(c).norm();
    if (norm == 0.0) throw Error(ErrorKind::NotPositiveDefinite, "zero column in graded factor");
    x.col(c) /= norm;
    ell(c) += std::log(norm);
  }
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(x.rows()));
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> xb_new, xs_new;

  bool converged = false;
  for (int sweep = 0; sweep < 60 && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const bool i_big = ell(i) >= ell(j);
        const Eigen::Index b = i_big ? i : j;
        const Eigen::Index s = i_big ? j : i;
        const Scalar p = x.col(b).dot(x.col(s));
        const double abs_p = std::abs(p);
        if (abs_p <= tol) continue;
        converged = false;
        const double r = std::exp(ell(s) - ell(b));
        const double z = (r * r - 1.0) / (2.0 * abs_p);
        const double sgn = r < 1.0 ? -1.0 : 1.0;
        const double tr = sgn / (std::abs(z) + std::sqrt(r * r + z * z));
        const double t = tr * r;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const Scalar back = conj_if(unit_phase(p));
        xb_new = x.col(b) - (tr * r * r) * back * x.col(s);
        xs_new = tr * x.col(b) + back * x.col(s);
        const double nb = xb_new.norm();
        const double ns = xs_new.norm();
        if (nb == 0.0 || ns == 0.0)
          throw Error(ErrorKind::NotPositiveDefinite, "rank-deficient graded factor");
        x.col(b) = xb_new / nb;
        x.col(s) = xs_new / ns;
        ell(b) += std::log(c * nb);
        ell(s) += std::log(c * ns);
      }
    }
  }
  return {std::move(x), std::move(ell)};
}

template GradedGram<double> orthogonalize_graded<double>(Eigen::MatrixXd, RealVector);
template GradedGram<Complex> orthogonalize_graded<Complex>(Eigen::MatrixXcd, RealVector);

}  // namespace nhtopo
