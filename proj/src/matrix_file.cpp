#include "nhtopo/matrix_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "nhtopo/error.hpp"

namespace nhtopo {

namespace {

// Parses a real number at the front of `s`, accepting an explicit leading '+'.
bool take_real(std::string_view& s, double& value) {
  std::string_view body = s;
  bool negative = false;
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body.empty() || body.front() == '+' || body.front() == '-') return false;
  const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc()) return false;
  if (negative) value = -value;
  s.remove_prefix(static_cast<std::size_t>(end - s.data()));
  return true;
}

}  // namespace

Complex parse_complex(std::string_view token) {
  const std::string original(token);
  std::string_view s = token;
  double first = 0.0;
  if (!take_real(s, first)) throw Error(ErrorKind::Parse, "bad complex literal '" + original + "'");
  Complex value;
  if (s.empty()) {
    value = {first, 0.0};
  } else if (s == "i") {
    value = {0.0, first};
  } else {
    double second = 0.0;
    if ((s.front() != '+' && s.front() != '-') || !take_real(s, second) || s != "i")
      throw Error(ErrorKind::Parse, "bad complex literal '" + original + "'");
    value = {first, second};
  }
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw Error(ErrorKind::Parse, "non-finite entry '" + original + "'");
  return value;
}

std::string format_double(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 17);
  return std::string(buffer, end);
}

std::string format_complex(Complex value) {
  std::string out = format_double(value.real());
  const double im = value.imag();
  out += std::signbit(im) ? "-" : "+";
  out += format_double(std::abs(im));
  out += 'i';
  return out;
}

MatrixFile parse_matrix_file(std::istream& in) {
  std::vector<std::pair<std::string, int>> tokens;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string word;
    while (words >> word) tokens.emplace_back(word, line_no);
  }
  auto fail = [](const std::string& what, int at) {
    throw Error(ErrorKind::Parse, "line " + std::to_string(at) + ": " + what);
  };
  if (tokens.size() < 2) fail("missing header 'n m'", line_no);
  auto header = [&](std::size_t i) {
    long value = -1;
    const std::string& w = tokens[i].first;
    const auto [end, ec] = std::from_chars(w.data(), w.data() + w.size(), value);
    if (ec != std::errc() || end != w.data() + w.size() || value < 0) fail("bad header value '" + w + "'", tokens[i].second);
    return value;
  };
  const long n = header(0);
  const long m = header(1);
  if (n < 1) fail("dimension must be positive", tokens[0].second);
  const std::size_t expected = 2 + static_cast<std::size_t>(n * n * (m + 1));
  if (tokens.size() != expected)
    fail("expected " + std::to_string(expected - 2) + " entries, found " + std::to_string(tokens.size() - 2),
         tokens.back().second);

  std::size_t next = 2;
  auto read_block = [&] {
    ComplexMatrix block(n, n);
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) {
        const auto& [word, at] = tokens[next++];
        try {
          block(i, j) = parse_complex(word);
        } catch (const Error&) {
          fail("bad complex literal '" + word + "'", at);
        }
      }
    return block;
  };
  MatrixFile file;
  file.H = read_block();
  for (long c = 0; c < m; ++c) file.couplings.push_back(read_block());
  return file;
}

MatrixFile read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
  return parse_matrix_file(in);
}

void write_matrix_file(std::ostream& out, const MatrixFile& file) {
  const Eigen::Index n = file.H.rows();
  out << n << ' ' << file.couplings.size() << '\n';
  auto write_block = [&](const ComplexMatrix& block) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) out << (j ? " " : "") << format_complex(block(i, j));
      out << '\n';
    }
  };
  write_block(file.H);
  for (const ComplexMatrix& c : file.couplings) {
    out << '\n';
    write_block(c);
  }
}

}  // namespace nhtopo
