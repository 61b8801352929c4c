#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "nhtopo/linalg.hpp"

namespace nhtopo {

/// Plain-text system description; grammar in docs/matrix_file.md.
struct MatrixFile {
  ComplexMatrix H;
  std::vector<ComplexMatrix> couplings;
};

/// Throws Error(Parse) with a line number on malformed input.
MatrixFile parse_matrix_file(std::istream& in);
MatrixFile read_matrix_file(const std::string& path);
void write_matrix_file(std::ostream& out, const MatrixFile& file);

/// "re", "imi" or "re+imi" / "re-imi".
Complex parse_complex(std::string_view token);

/// Shortest form that keeps 17 significant digits; independent of the locale.
std::string format_double(double value);
std::string format_complex(Complex value);

}  // namespace nhtopo
