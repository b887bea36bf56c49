#pragma once

#include <stdexcept>
#include <string>

namespace ckdiag {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data (unparseable record, bad document).
class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error(msg) {}
};

// A precondition on an operation was violated.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// Configuration file failed validation. `field` holds the offending path.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field_path, const std::string& msg)
        : Error("config field '" + field_path + "': " + msg), field(field_path) {}
    std::string field;
};

// Persisted artifact has an unsupported version tag.
class VersionError : public Error {
public:
    explicit VersionError(const std::string& msg) : Error(msg) {}
};

// External provider failure (unreachable service, dimension mismatch).
class ProviderError : public Error {
public:
    explicit ProviderError(const std::string& msg) : Error(msg) {}
};

}  // namespace ckdiag
