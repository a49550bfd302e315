#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace iosim {

// Invalid user-facing configuration: sizes, flags, file contents.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Broken contract between components: shape or index mismatches.
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite state detected at a sample boundary, in a precision mode
// where that aborts the run.
struct DivergenceError : std::runtime_error {
    std::int64_t sample_index;
    DivergenceError(std::int64_t sample, const std::string& msg)
        : std::runtime_error(msg), sample_index(sample) {}
};

}  // namespace iosim
