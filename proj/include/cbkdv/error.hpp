#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cbkdv {

enum class Errc {
    DegenerateDispersion,
    InvalidExponent,
    DomainError,
    UnsupportedIntegrationConstant,
    StencilOutOfDomain,
    NonIntegerExponent,
    OrderMismatch,
    OverflowToInfinity,
    StepSizeInvalid,
    InvalidArgument,
};

std::string_view to_string(Errc code) noexcept;

/// Exception carrying one of the library's error categories.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace cbkdv
