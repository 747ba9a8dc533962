#pragma once

#include <stdexcept>
#include <string>

namespace facade_forge {

enum class ErrorKind {
    InvalidInput,
    InvalidParameter,
    NotFound,
    MalformedFile,
    UnsupportedFormat,
    DegenerateMask,
    BackendFailure,
    Io,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return "invalid-input";
        case ErrorKind::InvalidParameter: return "invalid-parameter";
        case ErrorKind::NotFound: return "not-found";
        case ErrorKind::MalformedFile: return "malformed-file";
        case ErrorKind::UnsupportedFormat: return "unsupported-format";
        case ErrorKind::DegenerateMask: return "degenerate-mask";
        case ErrorKind::BackendFailure: return "backend-failure";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

/// Library-wide exception. Every failure the library reports carries a kind so
/// the CLI can map it onto an exit code without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace facade_forge
