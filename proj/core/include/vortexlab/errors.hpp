/// @file errors.hpp
/// @brief Error taxonomy shared by the library and the CLI exit-code map.

#pragma once

#include <stdexcept>
#include <string>

namespace vtx {

/// Precondition or configuration violation. CLI exit code 2.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Iterative solver failed to reach its tolerance. CLI exit code 3.
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Required input file or prior stage output is absent. CLI exit code 4.
struct MissingInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vtx
