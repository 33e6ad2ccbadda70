#pragma once

#include <stdexcept>
#include <string>

namespace actdet {

// Thrown for malformed or inconsistent input data (files, sequences,
// annotations, checkpoints). CLI maps this to exit code 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape mismatch between operands (matrices, layers, checkpoints vs data).
struct DimensionError : DataError {
    explicit DimensionError(const std::string& msg) : DataError(msg) {}
};

// Invalid configuration or invalid argument values. CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// NaN/Inf detected where finite values are required. CLI maps this to exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace actdet
