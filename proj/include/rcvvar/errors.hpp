#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rcvvar {

// Bad configuration values (sizes, grids, correlation parameters, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Constant or otherwise unusable input where variation is required.
struct DegenerateInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A least-squares refit hit a numerically rank-deficient design.
// Carries the offending model so callers can decide on a ridge fallback.
struct SingularFitError : std::runtime_error {
  std::vector<int> model;
  SingularFitError(const std::string& msg, std::vector<int> offending)
      : std::runtime_error(msg), model(std::move(offending)) {}
};

// Numerical failure outside of rank problems (nonpositive variance, ...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested inference is not defined for the given inputs
// (e.g. empty intersection of the two refitted-cross-validation models).
struct InferenceUnavailableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File input/output failures; message names the path involved.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rcvvar
