#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netcrit {

enum class ErrorCode {
    LoopArc,
    Disconnected,
    NonpositiveLength,
    InvalidArgument,
    InadmissiblePair,
    OutOfDomain,
    NonCoercive,
    EmptyFeasibleSet,
    NonFiniteLayer,
    ParameterConstraint,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library error carrying a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace netcrit
