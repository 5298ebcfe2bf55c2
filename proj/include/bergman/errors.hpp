#pragma once

#include <stdexcept>
#include <string>

namespace bergman {

enum class ErrorKind {
    InvalidArgument,
    InvalidRange,
    TruncationInfeasible,
    InvalidMoments,
    TailVanished,
    SeparationViolated,
    ArcTooLong,
    EmptySample,
    QuadratureMismatch,
    NoAdmissiblePair,
    BudgetExceeded,
    Config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what)
{
    if (!cond) fail(kind, what);
}

} // namespace bergman
