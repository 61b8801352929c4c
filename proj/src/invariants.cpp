#include "nhtopo/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "nhtopo/effective_state.hpp"
#include "nhtopo/error.hpp"
#include "nhtopo/parallel.hpp"

namespace nhtopo {

int default_thread_count() {
  if (const char* env = std::getenv("NHTOPO_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double grid_k(int j, int n) { return -std::numbers::pi + kTwoPi * j / n; }

struct ChiralBasis {
  Eigen::Vector2cd minus, plus;
};

ChiralBasis chiral_basis(const Mat2& chiral) {
  Eigen::SelfAdjointEigenSolver<Mat2> solver((chiral + chiral.adjoint()) / 2.0);
  const auto& ev = solver.eigenvalues();
  if (std::abs(ev(0) + 1.0) > 1e-10 || std::abs(ev(1) - 1.0) > 1e-10)
    throw Error(ErrorKind::NotChiral, "chiral operator must have eigenvalues -1 and +1");
  return {solver.eigenvectors().col(0), solver.eigenvectors().col(1)};
}

void check_point(const Mat2& h, const Mat2& chiral) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double defect = (chiral * h.adjoint() * chiral.adjoint() + h).cwiseAbs().maxCoeff();
  if (defect > 1e-8 * scale) throw Error(ErrorKind::NotChiral, "chiral relation violated");
  if (std::abs(h.determinant()) < 1e-12) throw Error(ErrorKind::GapClosed, "det H(k) vanishes on the grid");
}

// Returns false when a phase step reaches pi/2.
bool accumulate(const BlochFamily& family, const Mat2& chiral, const ChiralBasis& basis, int n, double& total) {
  total = 0.0;
  Complex first = 0.0, previous = 0.0;
  for (int j = 0; j <= n; ++j) {
    Complex q;
    if (j < n) {
      const Mat2 h = family(grid_k(j, n));
      check_point(h, chiral);
      q = basis.minus.dot(h * basis.plus);
    } else {
      q = first;
    }
    if (j == 0) {
      first = q;
    } else {
      const double step = std::arg(q / previous);
      if (std::abs(step) >= std::numbers::pi / 2.0) return false;
      total += step;
    }
    previous = q;
  }
  return true;
}

}  // namespace

WindingResult winding_number(const BlochFamily& family, const Mat2& chiral, int grid_size) {
  if (grid_size < 3) throw Error(ErrorKind::InvalidParams, "winding grid needs at least 3 points");
  const ChiralBasis basis = chiral_basis(chiral);
  int n = grid_size;
  for (int attempt = 0; attempt < 3; ++attempt, n *= 4) {
    double total = 0.0;
    if (!accumulate(family, chiral, basis, n, total)) continue;
    WindingResult result;
    result.raw = total / kTwoPi;
    result.value = static_cast<int>(std::lround(result.raw));
    result.grid_size = n;
    return result;
  }
  throw Error(ErrorKind::GapClosed, "phase steps stay above pi/2 after refinement");
}

Complex trace_formula_winding(const BlochFamily& family, const Mat2& chiral, int grid_size) {
  const double dk = kTwoPi / grid_size;
  Complex sum = 0.0;
  for (int j = 0; j < grid_size; ++j) {
    const double k = grid_k(j, grid_size);
    const Mat2 derivative = (family(k + dk) - family(k - dk)) / (2.0 * dk);
    sum += (chiral * family(k).inverse() * derivative).trace();
  }
  return sum * dk / (4.0 * std::numbers::pi * kI);
}

BlochFamily band_family(const ModelParams& params) {
  validate(params);
  return [params](double k) { return bloch_hamiltonian(params, k); };
}

BlochFamily state_family(const ModelParams& params) {
  validate(params);
  return [params](double k) { return effective_bloch_closed_form(params, k).matrix; };
}

WindingResult band_invariant(const ModelParams& params, int grid_size) {
  return winding_number(band_family(params), pauli::x(), grid_size);
}

WindingResult state_invariant(const ModelParams& params, int grid_size) {
  return winding_number(state_family(params), pauli::x(), grid_size);
}

ZeroModes zero_modes(const std::vector<Complex>& spectrum, double tol_abs) {
  ZeroModes out;
  for (const Complex& e : spectrum)
    if (std::abs(e) < tol_abs) out.energies.push_back(e);
  out.count = static_cast<int>(out.energies.size());
  return out;
}

std::vector<Complex> lattice_spectrum(const ModelParams& params, BoundaryCondition bc, SpectrumKind which) {
  std::vector<Complex> values;
  if (which == SpectrumKind::Bands) {
    Eigen::EigenSolver<RealMatrix> solver(lattice_hamiltonian_real(params, bc), false);
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::Defective, "eigensolver did not converge");
    const auto& ev = solver.eigenvalues();
    values.assign(ev.data(), ev.data() + ev.size());
  } else {
    const EffectiveSpectrum spectrum = effective_lattice_spectrum(params, bc);
    for (Eigen::Index i = 0; i < spectrum.energies.size(); ++i) values.emplace_back(spectrum.energies(i), 0.0);
  }
  std::sort(values.begin(), values.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return values;
}

double zero_mode_scale(const std::vector<Complex>& spectrum, SpectrumKind which) {
  if (spectrum.empty()) return 0.0;
  if (which == SpectrumKind::Bands) {
    double radius = 0.0;
    for (const Complex& e : spectrum) radius = std::max(radius, std::abs(e));
    return radius;
  }
  double lo = spectrum.front().real(), hi = lo;
  for (const Complex& e : spectrum) {
    lo = std::min(lo, e.real());
    hi = std::max(hi, e.real());
  }
  return hi - lo;
}

SpectrumScan spectrum_scan(const ModelParams& base, const std::vector<double>& U_values, BoundaryCondition bc,
                           SpectrumKind which, const ScanOptions& options) {
  validate(base);
  SpectrumScan scan;
  scan.U_values = U_values;
  scan.eigenvalues = parallel_map<std::vector<Complex>>(U_values.size(), options.threads, [&](std::size_t i) {
    ModelParams p = base;
    p.U = U_values[i];
    return lattice_spectrum(p, bc, which);
  });
  for (const auto& spectrum : scan.eigenvalues) {
    const double tol = options.zero_mode_rel_tol * zero_mode_scale(spectrum, which);
    scan.zero_mode_tol.push_back(tol);
    scan.zero_mode_count.push_back(zero_modes(spectrum, tol).count);
  }
  return scan;
}

std::string region_label(int W, int w) {
  if (W == 0 && w == 0) return "I";
  if (W == 0 && w == 1) return "II";
  if (W == 1 && w == 0) return "III";
  if (W == 1 && w == 1) return "IV";
  return "other";
}

PhasePoint region(const ModelParams& params, int grid_size, double boundary_tol) {
  validate(params);
  const auto [ug_minus, ug_plus] = gap_closing_points(params);
  const auto [uc_minus, uc_plus] = critical_points(params);
  for (double line : {ug_minus, ug_plus, uc_minus, uc_plus})
    if (std::abs(params.U - line) <= boundary_tol)
      throw Error(ErrorKind::OnBoundary, "U lies on a transition line");
  PhasePoint point;
  point.U = params.U;
  point.gamma = params.gamma;
  point.W = band_invariant(params, grid_size).value;
  point.w = state_invariant(params, grid_size).value;
  point.region = region_label(point.W, point.w);
  return point;
}

}  // namespace nhtopo
