#pragma once

#include <stdexcept>
#include <string>

namespace slicevis {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI when reporting failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

/// Invalid or inconsistent configuration. Messages carry the field path.
class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config"; }
};

class UsageError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "usage"; }
};

class IoError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "io"; }
};

/// A dataset on disk does not match its manifest (digest, count, shape).
class IntegrityError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "integrity"; }
};

class EncodingError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "encoding"; }
};

class DataError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "data"; }
};

class TrainingError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "training"; }
};

}  // namespace slicevis
