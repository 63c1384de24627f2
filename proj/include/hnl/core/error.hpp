#pragma once

#include <stdexcept>
#include <string>

namespace hnl {

/// Bad arguments or malformed input data (precondition violations).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A configuration file failed schema validation. The message names the field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure during training or solving (non-finite values, singular
/// systems, infeasible problems that cannot be reported as a status).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hnl
