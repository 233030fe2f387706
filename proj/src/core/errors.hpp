#pragma once

#include <stdexcept>

namespace oemdec {

// Invalid user-supplied parameter, dimension mismatch, or violated precondition.
struct ParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerical failure (factorization breakdown, non-finite intermediate).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace oemdec
