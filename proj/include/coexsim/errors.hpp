#pragma once

#include <stdexcept>
#include <string>

namespace coexsim {

// Bad user-facing configuration or malformed inputs (CLI exit code 2).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dimension mismatch between a grid/buffer and the waveform parameters.
struct shape_error : config_error {
    using config_error::config_error;
};

// A lookup outside the covered frequency/distance range.
struct range_error : config_error {
    using config_error::config_error;
};

// Solver or estimator failed to converge (CLI exit code 3).
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace coexsim
