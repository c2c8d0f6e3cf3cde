#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sgpvsel {

enum class ErrorCode {
    InvalidArgument,
    TooFewRows,
    ConstantColumn,
    RankDeficient,
    Underdetermined,
    DegenerateGic,
    ZeroLengthInterval,
    EmptyCandidateSet,
    CandidateTooLarge,
    AllWeightsInfinite,
    OracleDenominatorZero,
    NonNumericColumn,
    OutcomeMissing,
    Parse,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-readable code so that
// the experiment runner can tag failed replications without string matching.
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace sgpvsel
