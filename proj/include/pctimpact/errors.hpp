#ifndef PCTIMPACT_ERRORS_HPP
#define PCTIMPACT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pctimpact {

// Two families, mirrored by the CLI exit codes: DataError -> 1, ConfigError -> 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated operation precondition (empty input, out-of-domain argument).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Zero variance, or a pooled proportion of exactly 0 or 1.
class DegenerateError : public DataError {
public:
    using DataError::DataError;
};

class EmptyDatasetError : public DataError {
public:
    using DataError::DataError;
};

class LookupError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// The requested computation needs inputs the dataset does not carry.
class CapabilityError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

} // namespace pctimpact

#endif
