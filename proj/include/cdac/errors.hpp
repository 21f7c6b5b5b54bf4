#pragma once

#include <stdexcept>
#include <string>

namespace cdac {

// Invalid parameters, malformed configs, file-format mismatches.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failure: non-convergence, calibration failure, singular fits.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace cdac
