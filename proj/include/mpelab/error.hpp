#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpelab {

enum class ErrorCode {
    NonStochasticRow,
    NegativeEntry,
    DimensionMismatch,
    NonUniqueInvariant,
    EmptyTaboo,
    DomainError,
    ZeroGamma,
    RelationViolated,
    NonLatticeReward,
    BadParameters,
    InvalidState,
    Io,
    Parse,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mpelab
