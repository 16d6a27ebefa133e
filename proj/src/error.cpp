#include "cbkdv/error.hpp"

namespace cbkdv {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::DegenerateDispersion: return "DegenerateDispersion";
    case Errc::InvalidExponent: return "InvalidExponent";
    case Errc::DomainError: return "DomainError";
    case Errc::UnsupportedIntegrationConstant: return "UnsupportedIntegrationConstant";
    case Errc::StencilOutOfDomain: return "StencilOutOfDomain";
    case Errc::NonIntegerExponent: return "NonIntegerExponent";
    case Errc::OrderMismatch: return "OrderMismatch";
    case Errc::OverflowToInfinity: return "OverflowToInfinity";
    case Errc::StepSizeInvalid: return "StepSizeInvalid";
    case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace cbkdv
