#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace indefspec {

enum class ErrorKind {
    PoleProximity,
    DeltaOutOfRange,
    DomainError,
    BracketNotFound,
    NewtonDivergence,
    ContinuationStall,
    NoConvergence,
    DegenerateInput,
    InvalidGrid,
    RootResidualTooLarge,
    InvalidConfig,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::PoleProximity: return "PoleProximity";
        case ErrorKind::DeltaOutOfRange: return "DeltaOutOfRange";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::BracketNotFound: return "BracketNotFound";
        case ErrorKind::NewtonDivergence: return "NewtonDivergence";
        case ErrorKind::ContinuationStall: return "ContinuationStall";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::DegenerateInput: return "DegenerateInput";
        case ErrorKind::InvalidGrid: return "InvalidGrid";
        case ErrorKind::RootResidualTooLarge: return "RootResidualTooLarge";
        case ErrorKind::InvalidConfig: return "InvalidConfig";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map them to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace indefspec
