#include "cbkdv/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cbkdv/error.hpp"

namespace cbkdv {

namespace {

void require_positive_exponent(double p) {
    if (!(std::isfinite(p) && p > 0.0)) {
        std::ostringstream msg;
        msg << "exponent p must be positive and finite, got " << p;
        throw Error(Errc::InvalidExponent, msg.str());
    }
}

void require_dispersion(double mu) {
    if (mu == 0.0 || !std::isfinite(mu)) {
        throw Error(Errc::DegenerateDispersion, "mu must be nonzero and finite");
    }
}

}  // namespace

bool is_integer_exponent(double p) noexcept {
    return std::isfinite(p) && p == std::trunc(p);
}

double real_power(double base, double exponent) {
    if (!is_integer_exponent(exponent) && base < 0.0) {
        std::ostringstream msg;
        msg << "negative base " << base << " with non-integer exponent " << exponent;
        throw Error(Errc::DomainError, msg.str());
    }
    return std::pow(base, exponent);
}

Complex complex_power(Complex base, double exponent) {
    if (is_integer_exponent(exponent)) {
        // std::pow(complex, double) goes through exp/log; keep integer powers exact.
        auto n = static_cast<long long>(exponent);
        const bool invert = n < 0;
        if (invert) n = -n;
        Complex result{1.0, 0.0};
        Complex factor = base;
        while (n > 0) {
            if (n & 1) result *= factor;
            n >>= 1;
            if (n > 0) factor *= factor;
        }
        return invert ? Complex{1.0, 0.0} / result : result;
    }
    if (base.imag() != 0.0 || base.real() < 0.0) {
        std::ostringstream msg;
        msg << "non-integer exponent " << exponent << " requires a nonnegative real base, got "
            << base;
        throw Error(Errc::DomainError, msg.str());
    }
    return {std::pow(base.real(), exponent), 0.0};
}

GeneralizedNonlinearity::GeneralizedNonlinearity(std::vector<PowerTerm> terms)
    : terms_(std::move(terms)) {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        const double e = terms_[i].exponent;
        if (!(std::isfinite(e) && e >= 0.0)) {
            throw Error(Errc::InvalidExponent, "generalized nonlinearity exponents must be >= 0");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (terms_[j].exponent == e) {
                throw Error(Errc::InvalidExponent,
                            "generalized nonlinearity exponents must be pairwise distinct");
            }
        }
    }
}

bool GeneralizedNonlinearity::has_non_integer_exponent() const noexcept {
    return std::any_of(terms_.begin(), terms_.end(),
                       [](const PowerTerm& t) { return !is_integer_exponent(t.exponent); });
}

double GeneralizedNonlinearity::operator()(double u) const {
    double sum = 0.0;
    for (const auto& t : terms_) sum += t.coefficient * real_power(u, t.exponent);
    return sum;
}

NormalizedParams normalize(const CbkdvParams& params) {
    require_dispersion(params.mu);
    require_positive_exponent(params.p);
    if (params.d != 0.0) {
        throw Error(Errc::UnsupportedIntegrationConstant,
                    "the normalized form assumes a zero integration constant");
    }
    const double p = params.p;
    return NormalizedParams{
        .a = params.alpha / (params.mu * (p + 1.0)),
        .b = params.beta / (params.mu * (2.0 * p + 1.0)),
        .c = params.gamma / params.mu,
        .r = params.v / params.mu,
        .p = p,
    };
}

CbkdvParams denormalize(const NormalizedParams& norm, double mu) {
    require_dispersion(mu);
    require_positive_exponent(norm.p);
    const double p = norm.p;
    return CbkdvParams{
        .alpha = norm.a * mu * (p + 1.0),
        .beta = norm.b * mu * (2.0 * p + 1.0),
        .gamma = norm.c * mu,
        .mu = mu,
        .v = norm.r * mu,
        .p = p,
        .d = 0.0,
    };
}

Complex ode_residual(const NormalizedParams& norm, const ProfilePoint& pt) {
    require_positive_exponent(norm.p);
    const Complex u_p1 = complex_power(pt.u, norm.p + 1.0);
    const Complex u_2p1 = complex_power(pt.u, 2.0 * norm.p + 1.0);
    return -norm.r * pt.u + norm.a * u_p1 + norm.b * u_2p1 + norm.c * pt.du + pt.ddu;
}

double pde_residual_traveling(const CbkdvParams& params, const TravelingProfile& profile,
                              double x, double t, double h) {
    require_positive_exponent(params.p);
    if (!(h > 0.0 && std::isfinite(h))) {
        throw Error(Errc::StepSizeInvalid, "finite-difference step must be positive");
    }
    if (!profile.u) throw Error(Errc::InvalidArgument, "profile has no evaluator");

    const double zeta = x - params.v * t;
    const double time_shift = std::abs(params.v) * h;
    const double reach = std::max(2.0 * h, time_shift);
    if (zeta - reach < profile.zeta_min || zeta + reach > profile.zeta_max) {
        std::ostringstream msg;
        msg << "stencil [" << zeta - reach << ", " << zeta + reach << "] leaves profile range ["
            << profile.zeta_min << ", " << profile.zeta_max << "]";
        throw Error(Errc::StencilOutOfDomain, msg.str());
    }

    const auto& f = profile.u;
    const double u0 = f(zeta);
    const double up1 = f(zeta + h);
    const double um1 = f(zeta - h);
    const double up2 = f(zeta + 2.0 * h);
    const double um2 = f(zeta - 2.0 * h);

    // u(x, t +- h) = profile(zeta -+ v h)
    const double u_t = (f(zeta - params.v * h) - f(zeta + params.v * h)) / (2.0 * h);
    const double u_x = (up1 - um1) / (2.0 * h);
    const double u_xx = (up1 - 2.0 * u0 + um1) / (h * h);
    const double u_xxx = (up2 - 2.0 * up1 + 2.0 * um1 - um2) / (2.0 * h * h * h);

    const double advection =
        params.alpha * real_power(u0, params.p) + params.beta * real_power(u0, 2.0 * params.p);
    return std::abs(u_t + advection * u_x + params.gamma * u_xx + params.mu * u_xxx);
}

double generalized_ode_rhs(const GeneralizedNonlinearity& nl, double beta_over_mu, double p,
                           double gamma_over_mu, double r, double u, double du) {
    require_positive_exponent(p);
    double rhs = r * u - gamma_over_mu * du;
    for (const auto& term : nl.terms()) {
        const double e1 = term.exponent + 1.0;
        rhs -= term.coefficient * real_power(u, e1) / e1;
    }
    const double e2 = 2.0 * p + 1.0;
    rhs -= beta_over_mu * real_power(u, e2) / e2;
    return rhs;
}

}  // namespace cbkdv
