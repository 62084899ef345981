// Error taxonomy shared across the library. The CLI maps InputError to
// exit code 2 (bad files / bad config) and everything else to exit code 1.
#pragma once

#include <stdexcept>
#include <string>

namespace driftgate {

// Problems with user-supplied inputs: missing files, malformed CSV cells,
// invalid configuration. Recoverable by fixing the input.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problems that arise during computation on valid inputs: degenerate
// windows, single-class labels, rank-deficient designs.
struct ComputeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace driftgate
