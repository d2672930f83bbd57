#pragma once

#include <stdexcept>
#include <string>

namespace apf {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or missing configuration (config file, asset text, CLI wiring).
struct ConfigError : Error {
    using Error::Error;
};

// A documented precondition was violated by the caller.
struct PreconditionError : Error {
    using Error::Error;
};

// Backend-scoped failures. Each carries the backend id so campaign logs
// can attribute the failure without parsing the message.
struct BackendError : Error {
    BackendError(std::string backend, const std::string& msg)
        : Error(msg), backend_id(std::move(backend)) {}
    std::string backend_id;
};

// The backend cannot do what was asked (e.g. assistant prefill).
// Raised before any network I/O.
struct CapabilityError : BackendError {
    using BackendError::BackendError;
};

// Could not reach the backend at all (connect/DNS/socket layer).
struct TransportError : BackendError {
    using BackendError::BackendError;
};

// The backend answered with a non-success HTTP status.
struct HttpStatusError : BackendError {
    HttpStatusError(std::string backend, int http_status, const std::string& msg)
        : BackendError(std::move(backend), msg), status(http_status) {}
    int status;
};

// The request timed out.
struct TimeoutError : BackendError {
    using BackendError::BackendError;
};

// Dataset file problems, kept distinct so callers can tell them apart.
struct EmptyDatasetError : Error {
    using Error::Error;
};

struct DatasetSchemaError : Error {
    using Error::Error;
};

struct DatasetParseError : Error {
    DatasetParseError(std::size_t line_number, const std::string& msg)
        : Error(msg), line(line_number) {}
    std::size_t line;
};

}  // namespace apf
