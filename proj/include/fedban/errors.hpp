#pragma once

#include <stdexcept>

namespace fedban {

// Bad user-supplied configuration (files, CLI values, parameter ranges).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A value handed to a numeric routine lies outside its mathematical domain.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The mixing matrix has no usable spectral gap (some |lambda_p| >= 1, p >= 2).
struct SpectralGapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computed quantity that must be finite came out NaN or infinite.
struct NumericalFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Querying a private-sum mechanism that has seen no inputs.
struct EmptyMechanismError : std::logic_error {
  using std::logic_error::logic_error;
};

// Filesystem trouble: unreadable inputs, unwritable outputs.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fedban
