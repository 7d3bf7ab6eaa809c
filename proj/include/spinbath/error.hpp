// error.hpp: error kinds raised by the spinbath library.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spinbath {

enum class ErrorKind {
    InvalidArgument,
    NonConvergence,
    NonFiniteIntegrand,
    PoleOutsideInterval,
    StepTooLarge,
    NonFiniteState,
    NegativeFrequency,
    ZeroFrequency,
    Config,
};

[[nodiscard]] constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::NonFiniteIntegrand: return "NonFiniteIntegrand";
        case ErrorKind::PoleOutsideInterval: return "PoleOutsideInterval";
        case ErrorKind::StepTooLarge: return "StepTooLarge";
        case ErrorKind::NonFiniteState: return "NonFiniteState";
        case ErrorKind::NegativeFrequency: return "NegativeFrequency";
        case ErrorKind::ZeroFrequency: return "ZeroFrequency";
        case ErrorKind::Config: return "ConfigError";
    }
    return "Unknown";
}

/// Every failure in the library is reported as an Error carrying its kind.
/// Config errors come from scenario parsing; everything else is numerical
/// or a precondition violation.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) fail(kind, message);
}

}  // namespace spinbath
