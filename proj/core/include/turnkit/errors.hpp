#pragma once

#include <stdexcept>
#include <string>

namespace turnkit {

/// Base class for all turnkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input data, config, or arguments. CLI maps this to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure (unreadable/unwritable path). CLI maps this to exit code 1.
class IoError : public Error {
public:
    using Error::Error;
};

/// Service call failed after all retries (HTTP 5xx, timeouts, connection loss).
class TransientFailure : public Error {
public:
    using Error::Error;
};

/// Service call rejected outright (HTTP 4xx or a client-side precondition).
/// Never retried. CLI maps this to exit code 2.
class PermanentFailure : public Error {
public:
    using Error::Error;
};

/// Service responded but not in the agreed wire shape.
class ProtocolError : public Error {
public:
    using Error::Error;
};

} // namespace turnkit
