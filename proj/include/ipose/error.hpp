#pragma once

#include <stdexcept>
#include <string>

namespace ipose {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used in the CLI error record.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct InvalidInput : Error {
  explicit InvalidInput(const std::string& m) : Error("invalid-input", m) {}
};

struct ShapeError : Error {
  explicit ShapeError(const std::string& m) : Error("shape", m) {}
};

struct UnitError : Error {
  explicit UnitError(const std::string& m) : Error("unit-mismatch", m) {}
};

struct DegenerateFit : Error {
  explicit DegenerateFit(const std::string& m) : Error("degenerate-fit", m) {}
};

struct DegeneratePose : Error {
  explicit DegeneratePose(const std::string& m) : Error("degenerate-pose", m) {}
};

struct SkeletonError : Error {
  explicit SkeletonError(const std::string& m) : Error("skeleton", m) {}
};

struct DivergenceError : Error {
  DivergenceError(std::size_t step, const std::string& m)
      : Error("divergence", m), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

struct FormatError : Error {
  explicit FormatError(const std::string& m) : Error("format", m) {}
};

}  // namespace ipose
