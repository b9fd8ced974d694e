#pragma once

#include <stdexcept>
#include <string>

namespace csos {

enum class ErrorKind {
    SingularPoint,
    NonConvergent,
    DegenerateInput,
    MultiplierNotAdmissible,
    NotABetheSolution,
    GammaDegenerate,
    PathCollision,
    NoConvergence,
    CensusIncomplete,
    SingularTransfer,
    CoincidingRoots,
    IllConditionedFit,
    ConfigError,
};

const char* error_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(error_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace csos
