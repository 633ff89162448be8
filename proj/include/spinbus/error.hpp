#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spinbus {

enum class ErrorKind {
    InvalidSize,
    InvalidInput,
    Parse,
    Validation,
    Resource,
    BlockLeakage,
    InvalidTarget,
    InvalidState,
    InvalidClassification,
    RequiresMeEncoding,
    Precondition,
};

constexpr std::string_view to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidSize: return "invalid-size";
        case ErrorKind::InvalidInput: return "invalid-input";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::Resource: return "resource";
        case ErrorKind::BlockLeakage: return "block-leakage";
        case ErrorKind::InvalidTarget: return "invalid-target";
        case ErrorKind::InvalidState: return "invalid-state";
        case ErrorKind::InvalidClassification: return "invalid-classification";
        case ErrorKind::RequiresMeEncoding: return "requires-me-encoding";
        case ErrorKind::Precondition: return "precondition";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace spinbus
