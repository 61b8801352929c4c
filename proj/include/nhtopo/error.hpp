#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nhtopo {

enum class ErrorKind {
  InvalidParams,
  GammaZero,
  ComplexGap,
  Degenerate,
  NotPositiveDefinite,
  DegenerateFilling,
  Defective,
  NotSignDefinite,
  InconsistentReport,
  GapClosed,
  NotChiral,
  OnBoundary,
  ComplexSpectrum,
  NotThermalizable,
  Parse,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nhtopo
