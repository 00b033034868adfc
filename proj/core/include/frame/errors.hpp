#pragma once

#include <stdexcept>
#include <string>

namespace frame {

// Structural problems with input data (grids, shapes, schemas).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures (non-finite intermediates, failed factorizations).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad configuration or arguments.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace frame
