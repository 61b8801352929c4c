#include "nhtopo/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <variant>

#include "nhtopo/effective_state.hpp"
#include "nhtopo/error.hpp"
#include "nhtopo/invariants.hpp"
#include "nhtopo/matrix_file.hpp"
#include "nhtopo/parallel.hpp"
#include "nhtopo/statmech.hpp"
#include "nhtopo/symmetry.hpp"

namespace nhtopo {

namespace {

using Json = nlohmann::ordered_json;
using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// Scalars appended as "# key,value" lines in CSV and as keys in JSON.
  std::vector<std::pair<std::string, Cell>> summary;
};

struct Output {
  Table table;
  /// Replaces the generic table rendering when --format json is chosen.
  std::optional<Json> json;
  /// Verbatim text, used by model-matrix.
  std::optional<std::string> text;
};

struct Range {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
      v[static_cast<std::size_t>(i)] = count == 1 ? start : start + (stop - start) * i / (count - 1);
    return v;
  }
};

struct Config {
  std::string format = "csv";
  std::string out;
  int threads = 1;

  ModelParams model;
  std::string bc = "open";
  double sin_shift = 0.0;
  int grid = kDefaultWindingGrid;

  double tol_degeneracy = 1e-8;
  double tol_zero_mode = 1e-3;
  double tol_real = 1e-9;
  double tol_null = 1e-10;
  double tol_max_im = 1e-9;
  double tol_boundary = 1e-9;

  Range U_phase{-1.5, 2.0, 101};
  Range gamma_phase{-0.99, 0.99, 101};
  Range U_scan{-2.0, 2.0, 201};
  Range U_winding{-2.0, 2.5, 451};
  std::string which = "bands";

  int N = -1;
  int window = 0;

  std::string matrix;
  std::string op_phs, op_trs, op_cs, op_sl, op_ltrs, op_lcs;
  double beta = 1.0;

  std::vector<double> alphas{1e2, 1e3, 1e4};
  double demo_beta = 0.01;
  std::uint64_t seed = 1;
  int size = 6;
  int top = 2;

  std::string what = "hamiltonian";
  std::string couplings = "none";
  double scale_re = 1.0;
  double scale_im = 0.0;

  BoundaryCondition boundary() const { return bc == "periodic" ? BoundaryCondition::Periodic : BoundaryCondition::Open; }

  SpectralOptions spectral() const {
    SpectralOptions s;
    s.degeneracy_tol = tol_degeneracy;
    return s;
  }

  MetricOptions metric() const {
    MetricOptions m;
    m.spectral = spectral();
    m.real_tol = tol_real;
    m.null_tol = tol_null;
    m.max_im_tol = tol_max_im;
    return m;
  }
};

// ---- rendering ----

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

std::string csv_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::monostate>) return "";
        else if constexpr (std::is_same_v<V, double>) return format_double(v);
        else if constexpr (std::is_same_v<V, long long>) return std::to_string(v);
        else if constexpr (std::is_same_v<V, bool>) return v ? "true" : "false";
        else return csv_field(v);
      },
      cell);
}

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json json_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> Json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::monostate>) return nullptr;
        else if constexpr (std::is_same_v<V, double>) return json_number(v);
        else return Json(v);
      },
      cell);
}

void render(const Output& output, const std::string& format, std::ostream& os) {
  if (output.text) {
    os << *output.text;
    return;
  }
  if (format == "json") {
    if (output.json) {
      os << output.json->dump(2) << '\n';
      return;
    }
    // One table row per line keeps large sweeps readable and diffable.
    os << "{\n  \"columns\": " << Json(output.table.columns).dump() << ",\n  \"rows\": [";
    const auto& rows = output.table.rows;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      Json row = Json::array();
      for (const Cell& c : rows[r]) row.push_back(json_cell(c));
      os << (r ? ",\n    " : "\n    ") << row.dump();
    }
    os << (rows.empty() ? "]" : "\n  ]");
    for (const auto& [key, value] : output.table.summary)
      os << ",\n  " << Json(key).dump() << ": " << json_cell(value).dump();
    os << "\n}\n";
    return;
  }
  const Table& t = output.table;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
  for (const auto& [key, value] : t.summary) os << "# " << key << ',' << csv_cell(value) << '\n';
}

Json json_matrix(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({json_number(m(i, j).real()), json_number(m(i, j).imag())}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json json_vector(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(json_number(v(i)));
  return out;
}

void matrix_rows(Table& t, const std::string& name, const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      t.rows.push_back({name, static_cast<long long>(i), static_cast<long long>(j), m(i, j).real(), m(i, j).imag()});
}

void vector_rows(Table& t, const std::string& name, const RealVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    t.rows.push_back({name, static_cast<long long>(i), std::monostate{}, v(i), 0.0});
}

// ---- commands ----

Cell invariant_cell(const std::function<WindingResult()>& f) {
  try {
    return static_cast<long long>(f().value);
  } catch (const Error&) {
    return std::monostate{};
  }
}

Output phase_diagram(const Config& c) {
  const std::vector<double> Us = c.U_phase.values();
  const std::vector<double> gammas = c.gamma_phase.values();
  const std::size_t count = Us.size() * gammas.size();
  auto rows = parallel_map<std::vector<Cell>>(count, c.threads, [&](std::size_t i) {
    ModelParams p = c.model;
    p.U = Us[i / gammas.size()];
    p.gamma = gammas[i % gammas.size()];
    std::vector<Cell> row{p.U, p.gamma, std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{}};
    try {
      const PhasePoint point = region(p, c.grid, c.tol_boundary);
      row[2] = static_cast<long long>(point.W);
      row[3] = static_cast<long long>(point.w);
      row[4] = point.region;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::OnBoundary) row[4] = std::string("boundary");
      else row[5] = std::string(e.what());
    }
    return row;
  });
  Output out;
  out.table.columns = {"U", "gamma", "W", "w", "region", "error"};
  out.table.rows = std::move(rows);
  return out;
}

Output spectrum_scan_cmd(const Config& c) {
  validate(c.model);
  const SpectrumKind which = c.which == "effective" ? SpectrumKind::Effective : SpectrumKind::Bands;
  ScanOptions options;
  options.zero_mode_rel_tol = c.tol_zero_mode;
  options.threads = c.threads;
  const SpectrumScan scan = spectrum_scan(c.model, c.U_scan.values(), c.boundary(), which, options);
  Output out;
  out.table.columns = {"U", "index", "re_E", "im_E", "is_zero_mode"};
  for (std::size_t u = 0; u < scan.U_values.size(); ++u) {
    const auto& values = scan.eigenvalues[u];
    for (std::size_t i = 0; i < values.size(); ++i)
      out.table.rows.push_back({scan.U_values[u], static_cast<long long>(i), values[i].real(), values[i].imag(),
                                std::abs(values[i]) < scan.zero_mode_tol[u]});
  }
  return out;
}

Output density_cmd(const Config& c) {
  validate(c.model);
  const int N = c.N < 0 ? c.model.L + 1 : c.N;
  const DensityProfile profile = density_profile(c.model, c.boundary(), N);
  Output out;
  out.table.columns = {"cell", "occupation"};
  for (int j = 0; j < profile.cells(); ++j)
    out.table.rows.push_back({static_cast<long long>(j + 1), profile.per_cell[static_cast<std::size_t>(j)]});
  out.table.summary.emplace_back("edge_accumulation", edge_accumulation(profile, c.window));
  return out;
}

Output winding_cmd(const Config& c) {
  const std::vector<double> Us = c.U_winding.values();
  auto rows = parallel_map<std::vector<Cell>>(Us.size(), c.threads, [&](std::size_t i) {
    ModelParams p = c.model;
    p.U = Us[i];
    return std::vector<Cell>{p.U, invariant_cell([&] { return band_invariant(p, c.grid); }),
                             invariant_cell([&] { return state_invariant(p, c.grid); })};
  });
  Output out;
  out.table.columns = {"U", "W", "w"};
  out.table.rows = std::move(rows);
  return out;
}

std::optional<ComplexMatrix> read_operator(const std::string& path, Eigen::Index n) {
  if (path.empty()) return std::nullopt;
  const MatrixFile file = read_matrix_file(path);
  if (file.H.rows() != n) throw Error(ErrorKind::InvalidParams, "operator '" + path + "' has the wrong dimension");
  return file.H;
}

Output classify_cmd(const Config& c) {
  const MatrixFile file = read_matrix_file(c.matrix);
  const Eigen::Index n = file.H.rows();
  SymmetryOperators ops;
  ops.phs = read_operator(c.op_phs, n);
  ops.trs = read_operator(c.op_trs, n);
  ops.cs = read_operator(c.op_cs, n);
  ops.sublattice = read_operator(c.op_sl, n);
  ops.ltrs = read_operator(c.op_ltrs, n);
  ops.lcs = read_operator(c.op_lcs, n);
  const SymmetryReport report = symmetry_report(file.H, ops, c.spectral());
  const ClassLabel label = classify(report);

  Output out;
  Table& t = out.table;
  t.columns = {"field", "value"};
  const std::vector<std::pair<std::string, bool>> flags = {{"phs", report.phs}, {"trs", report.trs},
                                                           {"cs", report.cs},   {"sublattice", report.sublattice},
                                                           {"ltrs", report.ltrs}, {"lcs", report.lcs}};
  Json json_report;
  for (const auto& [name, value] : flags) {
    t.rows.push_back({name, value});
    json_report[name] = value;
  }
  Json squares = Json::object();
  for (const auto& [name, square] : {std::pair{"trs", report.trs_square}, std::pair{"ltrs", report.ltrs_square},
                                     std::pair{"phs", report.phs_square}}) {
    if (!square) continue;
    t.rows.push_back({std::string(name) + "_square", static_cast<long long>(*square)});
    squares[name] = *square;
  }
  json_report["squares"] = squares;
  Json residuals = Json::object();
  for (const auto& [name, value] : report.residuals) {
    t.rows.push_back({"residual_" + name, value});
    residuals[name] = json_number(value);
  }
  json_report["residuals"] = residuals;
  t.rows.push_back({"state_class", label.state_class});
  t.rows.push_back({"band_class_of_effective", label.band_class_of_effective});
  for (int d = 0; d < 3; ++d)
    t.rows.push_back({"invariant_d" + std::to_string(d + 1), label.invariant_groups[static_cast<std::size_t>(d)]});

  Json doc;
  doc["report"] = json_report;
  doc["state_class"] = label.state_class;
  doc["band_class_of_effective"] = label.band_class_of_effective;
  doc["invariant_groups"] = label.invariant_groups;
  out.json = doc;
  return out;
}

Output metric_cmd(const Config& c) {
  const MatrixFile file = read_matrix_file(c.matrix);
  const GeneralSystem system{file.H, file.couplings};
  const MetricOptions options = c.metric();

  std::string path = "full";
  MetricSolution solution;
  std::vector<int> retained;
  std::optional<ComplexMatrix> h_eff;
  ModeProbabilities probabilities;
  try {
    solution = solve_metric(system, options);
    for (Eigen::Index m = 0; m < solution.basis.size(); ++m) retained.push_back(static_cast<int>(m));
    probabilities = steady_probabilities(solution.basis, solution.T_c, c.beta);
    h_eff = effective_from_general(system.H, solution.T_c, c.beta);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::ComplexSpectrum) throw;
    path = "reduced";
    const ReducedSystem reduced = max_im_projector(system, options);
    solution = solve_reduced_metric(reduced, options);
    retained = reduced.retained_modes;
    probabilities = steady_probabilities(reduced.basis, solution.T_c, c.beta);
  }

  Output out;
  Table& t = out.table;
  t.columns = {"quantity", "i", "j", "re", "im"};
  matrix_rows(t, "T_c", solution.T_c);
  vector_rows(t, "mode_weight", solution.mode_weights);
  vector_rows(t, "energy", probabilities.energies);
  vector_rows(t, "probability", probabilities.probabilities);
  if (h_eff) matrix_rows(t, "H_eff", *h_eff);
  std::string retained_text;
  for (int m : retained) retained_text += (retained_text.empty() ? "" : " ") + std::to_string(m);
  t.summary = {{"path", path},
               {"retained_modes", retained_text},
               {"nullspace_dim", static_cast<long long>(solution.nullspace_dim)},
               {"non_unique", solution.non_unique}};
  for (const auto& [name, value] : solution.residuals) t.summary.emplace_back("residual_" + name, value);

  Json doc;
  doc["path"] = path;
  doc["retained_modes"] = retained;
  doc["nullspace_dim"] = solution.nullspace_dim;
  doc["non_unique"] = solution.non_unique;
  doc["T_c"] = json_matrix(solution.T_c);
  doc["mode_weights"] = json_vector(solution.mode_weights);
  doc["energies"] = json_vector(probabilities.energies);
  doc["probabilities"] = json_vector(probabilities.probabilities);
  doc["H_eff"] = h_eff ? json_matrix(*h_eff) : Json(nullptr);
  Json residuals = Json::object();
  for (const auto& [name, value] : solution.residuals) residuals[name] = json_number(value);
  doc["residuals"] = residuals;
  out.json = doc;
  return out;
}

// Diagonalizable system with a planted metric and `top` modes at the largest
// imaginary part; couplings are diagonal in the metric's eigenbasis.
GeneralSystem demo_system(std::uint64_t seed, int n, int top) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  auto gaussian = [&](Eigen::Index rows, Eigen::Index cols) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(normal(rng), normal(rng));
    return m;
  };
  const ComplexMatrix V = ComplexMatrix::Identity(n, n) + 0.6 * gaussian(n, n) / std::sqrt(static_cast<double>(n));
  ComplexVector E(n);
  RealVector w(n);
  for (int i = 0; i < n; ++i) {
    E(i) = Complex(-3.0 + 6.0 * unit(rng), i < top ? 0.3 : -1.5 + 1.6 * unit(rng));
    w(i) = 0.5 + 1.5 * unit(rng);
  }
  const ComplexMatrix metric = hermitian_part(V * w.cast<Complex>().asDiagonal() * V.adjoint());
  const ComplexMatrix Q = hermitian_eigen(metric).vectors;
  GeneralSystem system;
  system.H = V * E.asDiagonal() * V.inverse();
  for (int a = 0; a < 2; ++a) system.couplings.push_back(Q * gaussian(n, 1).asDiagonal() * Q.adjoint());
  return system;
}

Output theorem3_cmd(const Config& c) {
  GeneralSystem system;
  if (!c.matrix.empty()) {
    const MatrixFile file = read_matrix_file(c.matrix);
    system = {file.H, file.couplings};
  } else {
    if (c.top < 1 || c.top > c.size) throw Error(ErrorKind::InvalidParams, "--top must lie in [1, size]");
    system = demo_system(c.seed, c.size, c.top);
  }
  const MetricOptions options = c.metric();
  Output out;
  out.table.columns = {"alpha", "discrepancy"};
  std::vector<int> retained;
  for (double alpha : c.alphas) {
    const Theorem3Result r = theorem3_check(system, alpha, c.demo_beta, options);
    retained = r.retained_modes;
    out.table.rows.push_back({alpha, r.discrepancy});
  }
  std::string text;
  for (int m : retained) text += (text.empty() ? "" : " ") + std::to_string(m);
  out.table.summary.emplace_back("retained_modes", text);
  return out;
}

Output model_matrix_cmd(const Config& c) {
  validate(c.model);
  const int n = 2 * c.model.L;
  const SymmetryOperators ops = model_operators(c.model.L);
  MatrixFile file;
  if (c.what == "hamiltonian") {
    file.H = Complex(c.scale_re, c.scale_im) * lattice_hamiltonian(c.model, c.boundary(), c.sin_shift);
  } else {
    const std::map<std::string, std::optional<ComplexMatrix>> by_name = {
        {"phs", ops.phs}, {"trs", ops.trs}, {"cs", ops.cs}, {"sl", ops.sublattice}, {"ltrs", ops.ltrs}, {"lcs", ops.lcs}};
    file.H = *by_name.at(c.what);
  }
  if (c.couplings == "density") {
    for (int i = 0; i < n; ++i) {
      ComplexMatrix d = ComplexMatrix::Zero(n, n);
      d(i, i) = 1.0;
      file.couplings.push_back(d);
    }
  }
  std::ostringstream text;
  write_matrix_file(text, file);
  Output out;
  out.text = text.str();
  return out;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::InvalidParams:
      return 1;
    case ErrorKind::NotThermalizable:
      return 3;
    default:
      return 2;
  }
}

void add_range(CLI::App* sub, Range& range, const std::string& name) {
  sub->add_option("--" + name + "-start", range.start, "First " + name + " value")->capture_default_str();
  sub->add_option("--" + name + "-stop", range.stop, "Last " + name + " value")->capture_default_str();
  sub->add_option("--" + name + "-count", range.count, "Number of " + name + " values")
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  c.threads = default_thread_count();

  CLI::App app{"Dual topological invariants and steady-state metrics of non-Hermitian lattices", "nhtopo"};
  app.set_config("--config", "", "Read options from a key = value file; explicit flags win");
  app.add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--out", c.out, "Output path (default stdout)");
  app.add_option("--threads", c.threads, "Worker threads for sweeps")->check(CLI::Range(1, 4096))->capture_default_str();

  app.add_option("--U", c.model.U, "Onsite potential U")->capture_default_str();
  app.add_option("--t", c.model.t, "Hopping t")->capture_default_str();
  app.add_option("--J", c.model.J, "Pairing J")->capture_default_str();
  app.add_option("--gamma", c.model.gamma, "Non-Hermitian strength gamma")->capture_default_str();
  app.add_option("--T", c.model.T, "Temperature (0 for the ground state)")->capture_default_str();
  app.add_option("--L", c.model.L, "Number of cells")->capture_default_str();
  app.add_option("--bc", c.bc, "Boundary condition")->check(CLI::IsMember({"open", "periodic"}))->capture_default_str();
  app.add_option("--sin-shift", c.sin_shift, "Replace sin k by sin k + shift")->capture_default_str();

  auto positive = CLI::PositiveNumber;
  app.add_option("--tol-degeneracy", c.tol_degeneracy, "Eigenvalue clustering tolerance")->check(positive)->capture_default_str();
  app.add_option("--tol-zero-mode", c.tol_zero_mode, "Zero-mode tolerance relative to the spectral scale")->check(positive)->capture_default_str();
  app.add_option("--tol-real", c.tol_real, "Real-spectrum tolerance")->check(positive)->capture_default_str();
  app.add_option("--tol-null", c.tol_null, "Constraint nullspace threshold")->check(positive)->capture_default_str();
  app.add_option("--tol-max-im", c.tol_max_im, "Maximal imaginary part tolerance")->check(positive)->capture_default_str();
  app.add_option("--tol-boundary", c.tol_boundary, "Distance to a transition line counted as boundary")->check(positive)->capture_default_str();
  app.require_subcommand(1);

  auto* phase = app.add_subcommand("phase-diagram", "Regions I-IV over a (U, gamma) grid");
  add_range(phase, c.U_phase, "U");
  add_range(phase, c.gamma_phase, "gamma");
  phase->add_option("--grid", c.grid, "Brillouin-zone grid")->check(CLI::Range(8, 10000000))->capture_default_str();

  auto* scan = app.add_subcommand("spectrum-scan", "Lattice spectra over a U sweep with zero-mode flags");
  add_range(scan, c.U_scan, "U");
  scan->add_option("--which", c.which, "Spectrum")->check(CLI::IsMember({"bands", "effective"}))->capture_default_str();

  auto* density = app.add_subcommand("density", "Per-cell occupation of the N lowest effective modes");
  density->add_option("--N", c.N, "Particle number (default L + 1)")->check(CLI::NonNegativeNumber);
  density->add_option("--window", c.window, "Edge window in cells (0 selects max(5, L/10))")->check(CLI::NonNegativeNumber);

  auto* winding = app.add_subcommand("winding", "Band and state winding numbers over a U sweep");
  add_range(winding, c.U_winding, "U");
  winding->add_option("--grid", c.grid, "Brillouin-zone grid")->check(CLI::Range(8, 10000000))->capture_default_str();

  auto* classify_sub = app.add_subcommand("classify", "Symmetry report and class of a matrix");
  classify_sub->add_option("matrix,--matrix", c.matrix, "Matrix file")->required();
  classify_sub->add_option("--phs", c.op_phs, "Particle-hole unitary (matrix file)");
  classify_sub->add_option("--trs", c.op_trs, "Time-reversal unitary");
  classify_sub->add_option("--cs", c.op_cs, "Chiral unitary");
  classify_sub->add_option("--sl", c.op_sl, "Sublattice unitary");
  classify_sub->add_option("--ltrs", c.op_ltrs, "Linearized time-reversal unitary");
  classify_sub->add_option("--lcs", c.op_lcs, "Linearized chiral unitary");

  auto* metric = app.add_subcommand("metric", "Metric operator, steady-state probabilities and H_eff of a system");
  metric->add_option("matrix,--matrix", c.matrix, "Matrix file with couplings")->required();
  metric->add_option("--beta", c.beta, "Inverse temperature")->check(positive)->capture_default_str();

  auto* theorem3 = app.add_subcommand("theorem3-demo", "Reduced steady state versus the large-alpha limit");
  theorem3->add_option("--matrix", c.matrix, "Matrix file (default: generated system)");
  theorem3->add_option("--alpha", c.alphas, "Alpha values")->check(positive)->capture_default_str();
  theorem3->add_option("--beta", c.demo_beta, "Inverse temperature")->check(positive)->capture_default_str();
  theorem3->add_option("--seed", c.seed, "Seed of the generated system")->capture_default_str();
  theorem3->add_option("--size", c.size, "Dimension of the generated system")->check(CLI::Range(2, 200))->capture_default_str();
  theorem3->add_option("--top", c.top, "Modes sharing the largest imaginary part")->check(CLI::Range(1, 200))->capture_default_str();

  auto* model_matrix = app.add_subcommand("model-matrix", "Write the model lattice or a symmetry operator as a matrix file");
  model_matrix->add_option("--what", c.what, "Matrix to write")
      ->check(CLI::IsMember({"hamiltonian", "phs", "trs", "cs", "sl", "ltrs", "lcs"}))
      ->capture_default_str();
  model_matrix->add_option("--couplings", c.couplings, "Couplings to append")
      ->check(CLI::IsMember({"none", "density"}))
      ->capture_default_str();
  model_matrix->add_option("--scale-re", c.scale_re, "Real part of a factor multiplying H")->capture_default_str();
  model_matrix->add_option("--scale-im", c.scale_im, "Imaginary part of that factor")->capture_default_str();

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    Output result;
    if (phase->parsed()) result = phase_diagram(c);
    else if (scan->parsed()) result = spectrum_scan_cmd(c);
    else if (density->parsed()) result = density_cmd(c);
    else if (winding->parsed()) result = winding_cmd(c);
    else if (classify_sub->parsed()) result = classify_cmd(c);
    else if (metric->parsed()) result = metric_cmd(c);
    else if (theorem3->parsed()) result = theorem3_cmd(c);
    else result = model_matrix_cmd(c);

    if (c.out.empty()) {
      render(result, c.format, out);
    } else {
      std::ofstream file(c.out);
      if (!file) {
        err << "error: cannot open '" << c.out << "' for writing\n";
        return 1;
      }
      render(result, c.format, file);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace nhtopo
