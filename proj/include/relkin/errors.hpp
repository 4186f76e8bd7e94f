#pragma once

#include <stdexcept>
#include <string>

namespace relkin {

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define RELKIN_ERROR(Name)                                                   \
    struct Name : Error {                                                    \
        explicit Name(const std::string& what) : Error(#Name, what) {}       \
    }

RELKIN_ERROR(NonFiniteInput);
RELKIN_ERROR(ColinearPair);
RELKIN_ERROR(DegeneratePair);
RELKIN_ERROR(UndefinedAngle);
RELKIN_ERROR(StepTooSmall);
RELKIN_ERROR(DomainError);
RELKIN_ERROR(SingularAtZero);
RELKIN_ERROR(QuadratureNotConverged);
RELKIN_ERROR(EmptySurface);
RELKIN_ERROR(EmptyWindow);
RELKIN_ERROR(GridTooCoarse);
RELKIN_ERROR(ConfigError);

#undef RELKIN_ERROR

} // namespace relkin
