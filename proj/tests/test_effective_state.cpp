#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "nhtopo/effective_state.hpp"
#include "nhtopo/error.hpp"
#include "support.hpp"

using namespace nhtopo;
using nhtopo::testing::Rng;

namespace {

ModelParams params(double U, double t, double J, double gamma, double T, int L = 8) {
  ModelParams p;
  p.U = U;
  p.t = t;
  p.J = J;
  p.gamma = gamma;
  p.T = T;
  p.L = L;
  return p;
}

// Test-side oracle: -log of a Hermitian positive-definite 2x2 through its own eigensystem.
Mat2 log_oracle(const ModelParams& p, double k) {
  const double theta = std::log((p.J + p.gamma) / (p.J - p.gamma)) / 4.0;
  Mat2 S = Mat2::Zero();
  S(0, 0) = std::exp(theta);
  S(1, 1) = std::exp(-theta);
  const Mat2 h0 = S.inverse() * bloch_hamiltonian(p, k) * S;
  Eigen::SelfAdjointEigenSolver<Mat2> e0((h0 + h0.adjoint()) / 2.0);
  Eigen::Vector2cd w;
  w << std::exp(-p.beta() * e0.eigenvalues()(0)), std::exp(-p.beta() * e0.eigenvalues()(1));
  const Mat2 rho = S * e0.eigenvectors() * w.asDiagonal() * e0.eigenvectors().adjoint() * S;
  Eigen::SelfAdjointEigenSolver<Mat2> er((rho + rho.adjoint()) / 2.0);
  Eigen::Vector2cd l;
  l << -std::log(er.eigenvalues()(0)), -std::log(er.eigenvalues()(1));
  return er.eigenvectors() * l.asDiagonal() * er.eigenvectors().adjoint();
}

double min_state_gap(ModelParams p, double U) {
  p.U = U;
  double gap = INFINITY;
  for (int j = 0; j <= 400; ++j) {
    const double k = -std::numbers::pi + 2 * std::numbers::pi * j / 400;
    gap = std::min(gap, 2.0 * std::abs(effective_bloch_closed_form(p, k).W));
  }
  return gap;
}

}  // namespace

TEST_CASE("hermitianizing transform") {
  CHECK(hermitianizing_transform(params(0, 1, 1, 0, 1)).theta == 0.0);
  CHECK(hermitianizing_transform(params(0, 1, 1, 0.5, 1)).theta == doctest::Approx(0.274653).epsilon(1e-6));

  const Mat2 h0 = hermitianized_bloch(params(0, 1, 1, 0.5, 1), std::numbers::pi / 2);
  CHECK(max_abs(h0 - std::sqrt(0.75) * pauli::y()) < 1e-14);

  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const ModelParams p = testing::random_params(rng);
    const double k = testing::uniform(rng, -4, 4);
    const Mat2 S = hermitianizing_transform(p).bloch();
    const Mat2 direct = S.inverse() * bloch_hamiltonian(p, k) * S;
    CHECK(max_abs(direct - direct.adjoint()) < 1e-12);
    CHECK(max_abs(direct - hermitianized_bloch(p, k)) < 1e-12);
  }
}

TEST_CASE("model metric operator") {
  CHECK(max_abs(metric_operator_model(params(0, 1, 1, 0, 1)).bloch - Mat2::Identity()) < 1e-15);
  const Mat2 t = metric_operator_model(params(0, 1, 1, 0.5, 1)).bloch;
  CHECK(t(0, 0).real() == doctest::Approx(std::sqrt(3.0)));
  CHECK(t(1, 1).real() == doctest::Approx(1 / std::sqrt(3.0)));

  Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const ModelParams p = testing::random_params(rng);
    const Mat2 h = bloch_hamiltonian(p, testing::uniform(rng, -4, 4));
    const Mat2 tc = metric_operator_model(p).bloch;
    CHECK(max_abs(h * tc - tc * h.adjoint()) <= 1e-12);
  }
}

TEST_CASE("closed form agrees with an independent log oracle and with the graded log route") {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const ModelParams p = testing::random_params(rng);
    const double k = testing::uniform(rng, -4, 4);
    const EffectiveBloch closed = effective_bloch_closed_form(p, k);
    const EffectiveBloch via_log = effective_bloch_via_log(p, k);
    CHECK(max_abs(closed.matrix - log_oracle(p, k)) <= 1e-8);
    CHECK(max_abs(closed.matrix - via_log.matrix) <= 1e-8);
    CHECK(max_abs(via_log.matrix - via_log.matrix.adjoint()) <= 1e-12);
    CHECK(closed.W >= 0.0);
  }
}

TEST_CASE("fixed two-path point") {
  const ModelParams p = params(0.3, 1, 1, 0.5, 1);
  const EffectiveBloch closed = effective_bloch_closed_form(p, 1.1);
  const EffectiveBloch via_log = effective_bloch_via_log(p, 1.1);
  CHECK(max_abs(closed.matrix - via_log.matrix) <= 1e-8);
  CHECK(max_abs(via_log.matrix - via_log.matrix.adjoint()) <= 1e-12);
}

TEST_CASE("hermitian limit gives beta H") {
  Rng rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    ModelParams p = testing::random_params(rng);
    p.gamma = trial % 2 ? 0.0 : 1e-9;
    const double k = testing::uniform(rng, -4, 4);
    const Mat2 target = p.beta() * bloch_hamiltonian(p, k);
    CHECK(max_abs(effective_bloch_closed_form(p, k).matrix - target) <= 1e-8);
    CHECK(max_abs(effective_bloch_via_log(p, k).matrix - target) <= 1e-8);
  }
}

TEST_CASE("asymptotic seam is continuous") {
  // Choose T so that beta * gap / 2 straddles the seam at k = 0.7.
  ModelParams p = params(0.4, 1, 1, 0.6, 1);
  const double k = 0.7;
  const double gap = band_gap(p, k);
  p.T = gap / 2.0 / kAsymptoticSeam;
  const EffectiveBloch at = effective_bloch_closed_form(p, k);
  ModelParams below = p, above = p;
  below.T = p.T * (1 + 1e-13);
  above.T = p.T * (1 - 1e-13);
  const EffectiveBloch lo = effective_bloch_closed_form(below, k);
  const EffectiveBloch hi = effective_bloch_closed_form(above, k);
  CHECK(max_abs(lo.matrix - hi.matrix) <= 1e-10);
  CHECK(max_abs(at.matrix - effective_bloch_via_log(p, k).matrix) <= 1e-8);
}

TEST_CASE("extreme parameters stay finite") {
  const double J = std::sqrt(1.6e4);
  const double delta = std::sqrt(2.5e-10);
  const ModelParams p = params(1.2, 1, J, J - delta, 0.1);
  for (int j = 0; j < 50; ++j) {
    const double k = -std::numbers::pi + 2 * std::numbers::pi * j / 50;
    const EffectiveBloch e = effective_bloch_closed_form(p, k);
    CHECK(e.matrix.allFinite());
    CHECK(effective_bloch_via_log(p, k).matrix.allFinite());
  }
  ModelParams hot = params(0.3, 1, 1, 0.5, 1e-3);
  const EffectiveBloch far = effective_bloch_closed_form(hot, 1.0);
  CHECK(far.matrix.allFinite());
  CHECK(max_abs(far.matrix - effective_bloch_via_log(hot, 1.0).matrix) <= 1e-8 * std::max(1.0, far.W));
}

TEST_CASE("zero temperature limit") {
  ModelParams p = params(0.3, 1, 1, 0.5, 0.0);
  for (double k : {-2.0, 0.4, 1.1, 2.9}) {
    const EffectiveBloch closed = effective_bloch_closed_form(p, k);
    CHECK(closed.rescaled);
    CHECK(max_abs(closed.matrix - effective_bloch_via_log(p, k).matrix) <= 1e-10);
    ModelParams cold = p;
    cold.T = 1e-4;
    CHECK(max_abs(closed.matrix - cold.T * effective_bloch_closed_form(cold, k).matrix) <= 1e-3);
  }
}

TEST_CASE("state gap closes at the critical points") {
  const ModelParams p = params(0, 1, 1, 0.5, 1);
  const auto [lo, hi] = critical_points(p);
  CHECK(lo == doctest::Approx(-0.450694).epsilon(1e-6));
  CHECK(hi == doctest::Approx(1.549306).epsilon(1e-6));
  const auto [g_lo, g_hi] = critical_points(params(0, 1.3, 1, 0.0, 1));
  CHECK(g_lo == -1.3);
  CHECK(g_hi == 1.3);
  ModelParams cold = p;
  cold.T = 0.0;
  CHECK(critical_points(cold).second == 1.0);

  ModelParams at = p;
  at.U = 0.5 * std::log(3.0) + 1.0;
  CHECK(std::abs(2.0 * effective_bloch_closed_form(at, 0.0).W) < 1e-6);

  // Bisection on the minimum state gap, a root-finding oracle independent of the formula.
  Rng rng(25);
  for (int trial = 0; trial < 5; ++trial) {
    ModelParams q = testing::random_params(rng);
    const auto [c_lo, c_hi] = critical_points(q);
    for (double root : {c_lo, c_hi}) {
      double a = root - 0.2, b = root + 0.2;
      // Minimize the gap by golden-section search.
      const double phi = (std::sqrt(5.0) - 1) / 2;
      for (int it = 0; it < 80; ++it) {
        const double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        if (min_state_gap(q, x1) < min_state_gap(q, x2)) b = x2;
        else a = x1;
      }
      CHECK(std::abs((a + b) / 2 - root) <= 1e-6);
    }
  }
}

TEST_CASE("phs relation and sublattice breaking of the effective Hamiltonian") {
  Rng rng(26);
  for (int trial = 0; trial < 100; ++trial) {
    const ModelParams p = testing::random_params(rng);
    const double k = testing::uniform(rng, -4, 4);
    const Mat2 h = effective_bloch_closed_form(p, k).matrix;
    const Mat2 hm = effective_bloch_closed_form(p, -k).matrix;
    CHECK(max_abs(pauli::x() * h.transpose() * pauli::x() + hm) <= 1e-10);
  }
  ModelParams p = params(0, 0, 1, 0.5, 1);
  const Mat2 h = effective_bloch_closed_form(p, 0.8).matrix;
  CHECK(max_abs(pauli::z() * h * pauli::z() + h) > 1e-3);
}

TEST_CASE("effective lattice") {
  Rng rng(27);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelParams p = testing::random_params(rng, 8);
    const ComplexMatrix h = effective_lattice(p, BoundaryCondition::Periodic);
    CHECK(max_abs(h - h.adjoint()) <= 1e-12);
    std::vector<Complex> lattice, bloch;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    for (int i = 0; i < solver.eigenvalues().size(); ++i) lattice.emplace_back(solver.eigenvalues()(i));
    for (int n = 0; n < p.L; ++n) {
      const double W = effective_bloch_closed_form(p, 2 * std::numbers::pi * n / p.L).W;
      bloch.emplace_back(W);
      bloch.emplace_back(-W);
    }
    CHECK(testing::multiset_distance(lattice, bloch) <= 1e-8);
  }

  const ModelParams herm = params(0.4, 1, 1, 0.0, 0.7, 6);
  CHECK(max_abs(effective_lattice(herm, BoundaryCondition::Open) -
                herm.beta() * lattice_hamiltonian(herm, BoundaryCondition::Open)) <= 1e-10);

  const EffectiveSpectrum open = effective_lattice_spectrum(params(0.5, 1, 1, 0.5, 1, 50), BoundaryCondition::Open);
  int zero = 0;
  for (int i = 0; i < open.energies.size(); ++i) zero += std::abs(open.energies(i)) < 1e-3;
  CHECK(zero == 2);
}

TEST_CASE("density profile and edge accumulation") {
  const ModelParams flat = params(6.0, 1, 1, 0.0, 1, 40);
  const DensityProfile profile = density_profile(flat, BoundaryCondition::Open, flat.L);
  double total = 0;
  for (double n : profile.per_cell) {
    CHECK(n == doctest::Approx(1.0).epsilon(1e-6));
    total += n;
  }
  CHECK(total == doctest::Approx(flat.L).epsilon(1e-8));
  CHECK(std::abs(edge_accumulation(profile)) < 1e-5);

  DensityProfile uniform;
  uniform.per_cell.assign(30, 1.0);
  uniform.N = 30;
  CHECK(edge_accumulation(uniform) == 0.0);
  CHECK(default_edge_window(30) == 5);
  CHECK(default_edge_window(500) == 50);

  // Exactly degenerate filling: two zero modes with one particle between them at gamma = 0.
  const ModelParams topo = params(0.0, 1, 1, 0.0, 1, 20);
  CHECK_THROWS_AS(density_profile(topo, BoundaryCondition::Open, topo.L), Error);
}
