#pragma once

#include <cmath>
#include <random>

#include "nhtopo/model.hpp"

namespace nhtopo::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Valid model parameters with |gamma| <= 0.9 J.
inline ModelParams random_params(Rng& rng, int L = 8) {
  ModelParams p;
  p.J = uniform(rng, 0.3, 2.0);
  p.gamma = uniform(rng, -0.9, 0.9) * p.J;
  p.U = uniform(rng, -2.5, 2.5);
  p.t = uniform(rng, 0.1, 2.0);
  p.T = uniform(rng, 0.2, 3.0);
  p.L = L;
  return p;
}

inline ComplexMatrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(rng), normal(rng));
  return m;
}

inline ComplexMatrix random_hermitian(Rng& rng, Eigen::Index n) {
  const ComplexMatrix g = random_complex(rng, n, n);
  return (g + g.adjoint()) / 2.0;
}

/// Unitary from the QR factor of a Gaussian matrix.
inline ComplexMatrix random_unitary(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(rng, n, n));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

/// Well-conditioned eigenvector matrix: identity plus a scaled Gaussian.
inline ComplexMatrix random_eigenbasis(Rng& rng, Eigen::Index n, double spread = 0.3) {
  return ComplexMatrix::Identity(n, n) + spread * random_complex(rng, n, n) / std::sqrt(static_cast<double>(n));
}

/// Minimal distance between elements of two multisets after greedy matching.
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (const Complex& x : a) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < b.size(); ++j)
      if (std::abs(b[j] - x) < std::abs(b[best] - x)) best = j;
    worst = std::max(worst, std::abs(b[best] - x));
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return worst;
}

}  // namespace nhtopo::testing
