#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace moire {

/// Bad or inconsistent run configuration (maps to exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Eigensolver did not reach the requested tolerance (maps to exit code 3).
/// Carries the best residual norms reached so callers can report them.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> best_residuals = {},
              int iterations = 0)
      : std::runtime_error(what),
        best_residuals(std::move(best_residuals)),
        iterations(iterations) {}

  std::vector<double> best_residuals;
  int iterations;
};

/// Filesystem / artifact problems.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace moire
