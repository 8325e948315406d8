#pragma once

#include <stdexcept>
#include <string>

namespace misinfo {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed records, violated preconditions, bad config.
/// The CLI maps these to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Failure while running a stage on otherwise valid input (exit code 2).
class RuntimeError : public Error {
public:
    using Error::Error;
};

}  // namespace misinfo
