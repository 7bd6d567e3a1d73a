#pragma once

#include <stdexcept>
#include <string>

namespace grownet {

// Input data could not be read (malformed CSV, bad date, unknown id).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration or call shape (bad intervals, wrong sequence shape).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Analysis-level failure: non-convergence, insufficient or degenerate data.
struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitError : AnalysisError {
  using AnalysisError::AnalysisError;
};

}  // namespace grownet
