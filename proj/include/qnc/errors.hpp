#pragma once

#include <stdexcept>
#include <string>

namespace qnc {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on caller-supplied parameters does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Frequency grids are incompatible, or a comb point falls off the grid.
class GridError : public Error {
 public:
  using Error::Error;
};

// A transfer function is evaluated at (or numerically at) a pole.
class PoleError : public Error {
 public:
  using Error::Error;
};

// A reconstruction failed its forward-model residual check.
class ResidualError : public Error {
 public:
  using Error::Error;
};

// The output-noise budget diverges (zero measurement rate).
class DivergentBudget : public Error {
 public:
  using Error::Error;
};

// True for the errors a caller should treat as numerical failures rather than
// bad input.
inline bool is_numerical(const Error& e) {
  return dynamic_cast<const GridError*>(&e) != nullptr ||
         dynamic_cast<const PoleError*>(&e) != nullptr ||
         dynamic_cast<const ResidualError*>(&e) != nullptr ||
         dynamic_cast<const DivergentBudget*>(&e) != nullptr;
}

}  // namespace qnc
