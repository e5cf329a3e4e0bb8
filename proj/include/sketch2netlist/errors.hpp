#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace s2n {

enum class ErrorKind {
    DimensionMismatch,
    TooFewPoints,
    ParseError,
    UnknownClass,
    InvalidBox,
    InsufficientTerminalEvidence,
    NoNodesFound,
    DegenerateComponent,
    ConfigError,
    IoError,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::TooFewPoints: return "TooFewPoints";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::UnknownClass: return "UnknownClass";
        case ErrorKind::InvalidBox: return "InvalidBox";
        case ErrorKind::InsufficientTerminalEvidence: return "InsufficientTerminalEvidence";
        case ErrorKind::NoNodesFound: return "NoNodesFound";
        case ErrorKind::DegenerateComponent: return "DegenerateComponent";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Library-wide error type. `stage` is filled in by the pipeline driver so a
/// failure can be attributed to the step that raised it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    Error(ErrorKind kind, std::string message, std::string stage)
        : std::runtime_error("[" + stage + "] " + to_string(kind) + ": " + message),
          kind_(kind),
          stage_(std::move(stage)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& stage() const { return stage_; }

private:
    ErrorKind kind_;
    std::string stage_;
};

}  // namespace s2n
