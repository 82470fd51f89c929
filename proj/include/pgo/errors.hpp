// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace pgo {

struct MalformedLine : std::runtime_error {
  int line_no;
  explicit MalformedLine(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_no(line) {}
};

struct NonPositiveDefiniteInformation : std::runtime_error {
  int line_no;
  explicit NonPositiveDefiniteInformation(
      int line, const std::string& what = "information matrix is not positive definite")
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_no(line) {}
};

struct MixedDimensions : std::runtime_error {
  MixedDimensions() : std::runtime_error("SE2 and SE3 records in one file") {}
};

struct IndexOutOfRange : std::out_of_range {
  explicit IndexOutOfRange(const std::string& what) : std::out_of_range(what) {}
};

struct AlphaOutOfRange : std::invalid_argument {
  explicit AlphaOutOfRange(double alpha)
      : std::invalid_argument("alpha outside [0,1]: " + std::to_string(alpha)) {}
};

struct InvalidProbability : std::invalid_argument {
  explicit InvalidProbability(double p)
      : std::invalid_argument("probability outside (0,1): " + std::to_string(p)) {}
};

struct NotEnoughCandidatePairs : std::runtime_error {
  NotEnoughCandidatePairs(int wanted, int found)
      : std::runtime_error("need " + std::to_string(wanted) +
                           " candidate pairs, found " + std::to_string(found)) {}
};

struct SolverDiverged : std::runtime_error {
  explicit SolverDiverged(const std::string& what) : std::runtime_error(what) {}
};

struct NoPrior : std::runtime_error {
  NoPrior() : std::runtime_error("graph has no prior factor (gauge unfixed)") {}
};

struct IndefiniteSystem : std::runtime_error {
  explicit IndefiniteSystem(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateGeometry : std::runtime_error {
  explicit DegenerateGeometry(const std::string& what) : std::runtime_error(what) {}
};

struct LengthMismatch : std::invalid_argument {
  LengthMismatch(std::size_t a, std::size_t b)
      : std::invalid_argument("length mismatch: " + std::to_string(a) + " vs " +
                              std::to_string(b)) {}
};

}  // namespace pgo
