#pragma once

#include <stdexcept>
#include <string>

namespace mmdes {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed, missing or inconsistent input data (files, schemas, shapes).
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid experiment or command configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Singular systems, non-finite losses and other numerical failures.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace mmdes
