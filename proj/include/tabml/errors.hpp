#pragma once

#include <stdexcept>
#include <string>

namespace tabml {

// Error categories map 1:1 onto CLI exit codes:
//   ConfigError -> 2, DataError -> 3, NumericError -> 4.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Invalid parameters, malformed configuration, unknown hyperparameter keys.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error(message) {}
};

// Problems with the data itself: schema mismatches, parse failures,
// unseen categories, degenerate columns or labels.
class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error(message) {}
};

// Numerical failures: divergence, singular systems, non-finite values.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& message) : Error(message) {}
};

}  // namespace tabml
