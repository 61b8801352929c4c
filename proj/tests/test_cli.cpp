#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "nhtopo/cli.hpp"
#include "nhtopo/effective_state.hpp"
#include "nhtopo/matrix_file.hpp"
#include "support.hpp"

using namespace nhtopo;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream fields(line);
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string summary(const std::string& text, const std::string& key) {
  const std::string prefix = "# " + key + ",";
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  return {};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("nhtopo_cli_" + std::to_string(::getpid()) + "_" + std::to_string(++counter));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write(const TempDir& dir, const std::string& name, const std::vector<std::string>& args) {
  std::vector<std::string> full = {"model-matrix", "--out", dir.file(name)};
  full.insert(full.end(), args.begin(), args.end());
  const Run r = run(full);
  REQUIRE(r.code == 0);
  return dir.file(name);
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == 1);
  CHECK(run({"winding", "--U-count", "0"}).code == 1);
  CHECK(run({"winding", "--format", "xml"}).code == 1);
  CHECK(run({"winding", "--tol-boundary", "-1"}).code == 1);
  CHECK(run({"density", "--gamma", "2"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"classify", "/nonexistent/file"}).code == 1);
}

TEST_CASE("phase diagram single point and regions") {
  Run r = run({"phase-diagram", "--U-start", "1.2", "--U-count", "1", "--gamma-start", "0.5", "--gamma-count", "1"});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(r.out);
  CHECK(rows[0] == std::vector<std::string>{"U", "gamma", "W", "w", "region", "error"});
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][4] == "II");

  // Coarse version of the T = 0.2, t = 0.5 map, checked against the transition formulas.
  r = run({"phase-diagram", "--T", "0.2", "--t", "0.5", "--U-count", "15", "--gamma-count", "9", "--grid", "801",
           "--threads", "3"});
  REQUIRE(r.code == 0);
  rows = csv_rows(r.out);
  REQUIRE(rows.size() == 1 + 15 * 9);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ModelParams p;
    p.T = 0.2;
    p.t = 0.5;
    p.U = std::stod(rows[i][0]);
    p.gamma = std::stod(rows[i][1]);
    const auto [lo, hi] = critical_points(p);
    const int W = std::abs(p.U) < p.t;
    const int w = p.U > lo && p.U < hi;
    CAPTURE(p.U);
    CAPTURE(p.gamma);
    const std::string expected[2][2] = {{"I", "II"}, {"III", "IV"}};
    const bool on_line = std::abs(std::abs(p.U) - p.t) < 1e-9 || std::abs(p.U - lo) < 1e-9 || std::abs(p.U - hi) < 1e-9;
    CHECK(rows[i][4] == (on_line ? "boundary" : expected[W][w]));
  }
  // Row order is U-major.
  CHECK(rows[1][0] == rows[9][0]);
  CHECK(rows[1][1] != rows[2][1]);
}

TEST_CASE("phase diagram marks boundaries and per-point errors") {
  Run r = run({"phase-diagram", "--U-start", "1", "--U-count", "1", "--gamma-start", "0", "--gamma-stop", "1.2",
               "--gamma-count", "3"});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1][4] == "boundary");
  CHECK(rows[1][2].empty());
  CHECK(rows[3][4].empty());
  CHECK(rows[3][5].find("InvalidParams") != std::string::npos);

  // At gamma = 0 the two transitions coincide, so II and III never appear.
  r = run({"phase-diagram", "--gamma-start", "0", "--gamma-count", "1", "--U-count", "31"});
  for (const auto& row : csv_rows(r.out)) {
    CHECK(row[4] != "II");
    CHECK(row[4] != "III");
  }
}

TEST_CASE("sweeps are deterministic across thread counts") {
  const std::vector<std::string> base = {"phase-diagram", "--U-count", "7", "--gamma-count", "5", "--grid", "401"};
  auto with_threads = [&](const std::string& n) {
    auto args = base;
    args.insert(args.end(), {"--threads", n});
    return run(args).out;
  };
  const std::string one = with_threads("1");
  CHECK(one == with_threads("4"));
  CHECK(one == with_threads("1"));
}

TEST_CASE("spectrum scan zero-mode column") {
  const Run r = run({"spectrum-scan", "--U-count", "8"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  CHECK(rows[0] == std::vector<std::string>{"U", "index", "re_E", "im_E", "is_zero_mode"});
  REQUIRE(rows.size() == 1 + 8 * 100);
  std::map<double, int> zero_modes;
  for (std::size_t i = 1; i < rows.size(); ++i) zero_modes[std::stod(rows[i][0])] += rows[i][4] == "true";
  for (const auto& [U, count] : zero_modes) {
    CAPTURE(U);
    CHECK(count == (std::abs(U) < 1 ? 2 : 0));
  }

  const Run eff = run({"spectrum-scan", "--which", "effective", "--U-start", "1.2", "--U-count", "1"});
  int count = 0;
  for (const auto& row : csv_rows(eff.out))
    if (row[4] == "true") ++count;
  CHECK(count == 2);

  const Run json = run({"spectrum-scan", "--U-count", "3", "--L", "5", "--format", "json"});
  const Run csv = run({"spectrum-scan", "--U-count", "3", "--L", "5"});
  const Json doc = Json::parse(json.out);
  const auto csv_table = csv_rows(csv.out);
  REQUIRE(doc["rows"].size() + 1 == csv_table.size());
  for (std::size_t i = 0; i < doc["rows"].size(); ++i) {
    CHECK(doc["rows"][i][0].get<double>() == std::stod(csv_table[i + 1][0]));
    CHECK(doc["rows"][i][2].get<double>() == std::stod(csv_table[i + 1][2]));
    CHECK(doc["rows"][i][3].get<double>() == std::stod(csv_table[i + 1][3]));
    CHECK(doc["rows"][i][4].get<bool>() == (csv_table[i + 1][4] == "true"));
  }
}

TEST_CASE("density output") {
  Run r = run({"density", "--L", "20"});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(r.out);
  CHECK(rows[0] == std::vector<std::string>{"cell", "occupation"});
  REQUIRE(rows.size() == 21);
  double total = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) total += std::stod(rows[i][1]);
  CHECK(total == doctest::Approx(21.0).epsilon(1e-8));
  CHECK(!summary(r.out, "edge_accumulation").empty());

  // Deep in the trivial Hermitian phase each cell holds one particle.
  r = run({"density", "--L", "20", "--gamma", "0", "--U", "10", "--N", "20"});
  rows = csv_rows(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::abs(std::stod(rows[i][1]) - 1.0) < 1e-2);

  CHECK(run({"density", "--T", "0"}).code == 1);
  // At U = t = gamma = 0 the lattice splits into two identical chains, so every level is doubled.
  CHECK(run({"density", "--L", "6", "--U", "0", "--t", "0", "--gamma", "0", "--N", "7"}).code == 2);
}

TEST_CASE("winding output") {
  Run r = run({"winding", "--U-count", "10"});
  REQUIRE(r.code == 0);
  auto rows = csv_rows(r.out);
  CHECK(rows[0] == std::vector<std::string>{"U", "W", "w"});
  std::map<std::string, std::pair<std::string, std::string>> by_U;
  for (std::size_t i = 1; i < rows.size(); ++i) by_U[rows[i][0]] = {rows[i][1], rows[i][2]};
  CHECK(by_U.at("-1").first.empty());
  CHECK(by_U.at("1").first.empty());
  CHECK(by_U.at("0").first == "1");
  CHECK(by_U.at("0").second == "1");
  CHECK(by_U.at("1.5").first == "0");
  CHECK(by_U.at("1.5").second == "1");

  const Run reversed = run({"winding", "--U-start", "2.5", "--U-stop", "-2", "--U-count", "10"});
  auto back = csv_rows(reversed.out);
  for (std::size_t i = 1; i < back.size(); ++i) CHECK(by_U.at(back[i][0]) == std::pair{back[i][1], back[i][2]});

  r = run({"winding", "--gamma", "0", "--U-count", "24"});
  rows = csv_rows(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][1] == rows[i][2]);
}

TEST_CASE("classify") {
  TempDir dir;
  const std::string h = write(dir, "h.txt", {"--L", "6"});
  const std::string scaled = write(dir, "h2.txt", {"--L", "6", "--scale-im", "-1"});
  const std::string phs = write(dir, "phs.txt", {"--L", "6", "--what", "phs"});
  const std::string ltrs = write(dir, "ltrs.txt", {"--L", "6", "--what", "ltrs"});
  const std::string lcs = write(dir, "lcs.txt", {"--L", "6", "--what", "lcs"});
  const std::string cs = write(dir, "cs.txt", {"--L", "6", "--what", "cs"});

  Run r = run({"classify", h, "--phs", phs, "--ltrs", ltrs, "--lcs", lcs, "--format", "json"});
  REQUIRE(r.code == 0);
  Json doc = Json::parse(r.out);
  CHECK(doc["state_class"] == "BDI*");
  CHECK(doc["invariant_groups"] == Json::array({"Z", "0", "0"}));
  CHECK(doc["report"]["squares"]["ltrs"] == 1);

  r = run({"classify", scaled, "--cs", cs, "--lcs", lcs, "--format", "json"});
  doc = Json::parse(r.out);
  CHECK(doc["report"]["cs"] == false);
  CHECK(doc["report"]["lcs"] == true);
  CHECK(doc["report"]["residuals"]["cs"].get<double>() > 0.1);
  CHECK(doc["report"]["residuals"]["lcs"].get<double>() < 1e-8);

  testing::Rng rng(91);
  MatrixFile random;
  random.H = testing::random_complex(rng, 5, 5);
  {
    std::ofstream f(dir.file("random.txt"));
    write_matrix_file(f, random);
  }
  r = run({"classify", dir.file("random.txt")});
  bool saw_class = false;
  for (const auto& row : csv_rows(r.out))
    if (row[0] == "state_class") saw_class = row[1] == "A";
  CHECK(saw_class);

  {
    std::ofstream f(dir.file("bad.txt"));
    f << "2 0\n1 2\n3\n";
  }
  r = run({"classify", dir.file("bad.txt")});
  CHECK(r.code == 1);
  CHECK(r.err.find("line") != std::string::npos);
  {
    std::ofstream f(dir.file("jordan.txt"));
    f << "2 0\n0 1\n0 0\n";
  }
  CHECK(run({"classify", dir.file("jordan.txt"), "--lcs", dir.file("jordan.txt")}).code == 2);
}

TEST_CASE("metric") {
  TempDir dir;
  const std::string model = write(dir, "model.txt", {"--L", "4", "--bc", "periodic", "--couplings", "density"});
  Run r = run({"metric", model, "--format", "json"});
  REQUIRE(r.code == 0);
  Json doc = Json::parse(r.out);
  CHECK(doc["path"] == "full");
  for (int cell = 0; cell < 4; ++cell) {
    CHECK(doc["T_c"][2 * cell][2 * cell][0].get<double>() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-10));
    CHECK(doc["T_c"][2 * cell + 1][2 * cell + 1][0].get<double>() ==
          doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-10));
  }
  CHECK(doc["H_eff"].is_array());
  double total = 0.0;
  for (const auto& p : doc["probabilities"]) total += p.get<double>();
  CHECK(total == doctest::Approx(1.0));

  testing::Rng rng(92);
  const ComplexMatrix U = testing::random_unitary(rng, 4);
  MatrixFile herm;
  ComplexVector E(4), K(4);
  E << 1, -0.5, 2, 0.3;
  K << 0.1, 0.7, -1, 2;
  herm.H = U * E.asDiagonal() * U.adjoint();
  herm.couplings.push_back(U * K.asDiagonal() * U.adjoint());
  {
    std::ofstream f(dir.file("herm.txt"));
    write_matrix_file(f, herm);
  }
  r = run({"metric", dir.file("herm.txt"), "--format", "json"});
  REQUIRE(r.code == 0);
  doc = Json::parse(r.out);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(doc["T_c"][i][j][0].get<double>() - (i == j)) < 1e-10);

  MatrixFile lossy;
  lossy.H = ComplexMatrix::Zero(3, 3);
  lossy.H(0, 0) = Complex(1, 0.2);
  lossy.H(1, 1) = Complex(-1, 0.2);
  lossy.H(2, 2) = Complex(0.5, -1);
  lossy.H(0, 2) = 0.3;
  lossy.couplings.push_back(lossy.H.diagonal().real().cast<Complex>().asDiagonal());
  {
    std::ofstream f(dir.file("lossy.txt"));
    write_matrix_file(f, lossy);
  }
  r = run({"metric", dir.file("lossy.txt")});
  REQUIRE(r.code == 0);
  CHECK(summary(r.out, "path") == "reduced");
  const std::string retained = summary(r.out, "retained_modes");
  CHECK(std::count(retained.begin(), retained.end(), ' ') == 1);

  // Densities force a diagonal metric that this H only admits as diag(x, 0).
  {
    std::ofstream f(dir.file("cold.txt"));
    f << "2 2\n1 1\n0 2\n\n1 0\n0 0\n\n0 0\n0 1\n";
  }
  r = run({"metric", dir.file("cold.txt")});
  CHECK(r.code == 3);
  CHECK(r.err.find("NotThermalizable") != std::string::npos);
}

TEST_CASE("theorem3 demo") {
  const Run r = run({"theorem3-demo", "--format", "json"});
  REQUIRE(r.code == 0);
  const Json doc = Json::parse(r.out);
  REQUIRE(doc["rows"].size() == 3);
  const double d2 = doc["rows"][0][1], d3 = doc["rows"][1][1], d4 = doc["rows"][2][1];
  CHECK(d2 > d3);
  CHECK(d3 > d4);
  CHECK(d4 < 1e-6);
  CHECK(run({"theorem3-demo", "--top", "9"}).code == 1);
}

TEST_CASE("config file and output path") {
  TempDir dir;
  {
    std::ofstream f(dir.file("run.ini"));
    f << "# sweep settings\nT = 0.5\nL = 6\n[winding]\nU-count = 3\n";
  }
  Run r = run({"--config", dir.file("run.ini"), "winding", "--out", dir.file("w.csv")});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(dir.file("w.csv"));
  const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(csv_rows(written).size() == 4);

  // T = 0.5 moves the upper critical point to about 1.27: U = 1.25 is inside.
  r = run({"--config", dir.file("run.ini"), "winding", "--U-start", "1.25", "--U-count", "1"});
  CHECK(csv_rows(r.out)[1][2] == "1");
  r = run({"--config", dir.file("run.ini"), "winding", "--U-start", "1.25", "--U-count", "1", "--T", "0.1"});
  CHECK(csv_rows(r.out)[1][2] == "0");
}
