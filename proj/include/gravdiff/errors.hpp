#pragma once

#include <stdexcept>
#include <string>

namespace gravdiff {

/// Base of every error thrown by the library. The CLI maps the category to
/// an exit code (see ErrorCategory).
enum class ErrorCategory { Config, Numeric, Io };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

#define GRAVDIFF_DEFINE_ERROR(Name, Category)                                  \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what)                                 \
            : Error(ErrorCategory::Category, std::string(#Name ": ") + what) {}\
    }

GRAVDIFF_DEFINE_ERROR(StabilityError, Numeric);
GRAVDIFF_DEFINE_ERROR(StepSizeError, Numeric);
GRAVDIFF_DEFINE_ERROR(NonPhysicalInput, Numeric);
GRAVDIFF_DEFINE_ERROR(SymmetryError, Numeric);
GRAVDIFF_DEFINE_ERROR(PSDError, Numeric);
GRAVDIFF_DEFINE_ERROR(DomainError, Numeric);
GRAVDIFF_DEFINE_ERROR(ProtocolError, Numeric);
GRAVDIFF_DEFINE_ERROR(SeedError, Numeric);
GRAVDIFF_DEFINE_ERROR(ConfigError, Config);
GRAVDIFF_DEFINE_ERROR(IoError, Io);

#undef GRAVDIFF_DEFINE_ERROR

} // namespace gravdiff
