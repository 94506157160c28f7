#pragma once

#include <stdexcept>
#include <string>

namespace skelfit {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed input: schema violations, dimension mismatches, broken model invariants.
class InputError : public Error {
  public:
    using Error::Error;
};

// Degenerate or non-finite numerics (parallel 6D vectors, collinear point sets, NaN objectives).
class NumericalError : public Error {
  public:
    using Error::Error;
};

} // namespace skelfit
