#pragma once

#include <stdexcept>
#include <string>

namespace smcrf {

// Malformed input files, inconsistent corpora, degenerate samples.
// The CLI maps this to exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: NaN objective, fit divergence, failed line search.
// The CLI maps this to exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace smcrf
