#pragma once

#include <stdexcept>
#include <string>

namespace litaug {

enum class ErrorKind { Validation, Io, Gateway, Protocol };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

// Transport failures (connection refused, timeouts, 5xx). Retriable.
struct GatewayError : Error {
    explicit GatewayError(const std::string& what) : Error(ErrorKind::Gateway, what) {}
};

// A response that parsed but violates the wire contract.
struct ProtocolError : Error {
    explicit ProtocolError(const std::string& what) : Error(ErrorKind::Protocol, what) {}
};

// Process exit codes used by the CLI.
inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Validation: return 1;
        case ErrorKind::Io: return 2;
        case ErrorKind::Gateway:
        case ErrorKind::Protocol: return 3;
    }
    return 1;
}

}  // namespace litaug
