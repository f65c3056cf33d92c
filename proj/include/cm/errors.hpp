#pragma once

#include <stdexcept>
#include <string>

namespace cm {

// Malformed input: bad schema, inconsistent dimensions, unknown references.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Certification or solve failure on well-formed input.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cm
