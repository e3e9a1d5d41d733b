#pragma once

#include <stdexcept>
#include <string>

namespace musae {

// Bad flag values or invalid parameter combinations. CLI exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Resource limits, e.g. the dense oracle size cap. CLI exit code 3.
struct CapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Task preconditions not met by the data (malformed input, single-class
// training set, tree passed to link_split, ...). CLI exit code 4.
struct TaskError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace musae
