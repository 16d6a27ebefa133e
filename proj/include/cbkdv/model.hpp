#pragma once

// Parameter model and residuals of the compound Burgers-KdV equation
//
//     u_t + alpha u^p u_x + beta u^(2p) u_x + gamma u_xx + mu u_xxx = 0
//
// in the traveling frame zeta = x - v t, once integrated:
//
//     -v u + alpha/(p+1) u^(p+1) + beta/(2p+1) u^(2p+1) + gamma u' + mu u'' + d = 0
//
// and, after dividing by mu (with d = 0), the normalized form
//
//     -r u + a u^(p+1) + b u^(2p+1) + c u' + u'' = 0.

#include <complex>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace cbkdv {

using Complex = std::complex<double>;

/// Physical coefficients of the PDE together with the wave speed and
/// the integration constant of the traveling-wave reduction.
struct CbkdvParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double mu = 1.0;
    double v = 0.0;
    double p = 1.0;
    double d = 0.0;
};

/// Reduced coefficients (a, b, c, r) of the normalized traveling-wave ODE.
struct NormalizedParams {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double r = 0.0;
    double p = 1.0;
};

struct PowerTerm {
    double coefficient;
    double exponent;
};

/// P(u) = sum of coefficient * u^exponent over a finite set of distinct,
/// nonnegative exponents. The empty set represents P == 0.
class GeneralizedNonlinearity {
public:
    GeneralizedNonlinearity() = default;
    explicit GeneralizedNonlinearity(std::vector<PowerTerm> terms);

    [[nodiscard]] std::span<const PowerTerm> terms() const noexcept { return terms_; }
    [[nodiscard]] bool has_non_integer_exponent() const noexcept;

    /// P(u); throws DomainError for u < 0 with a non-integer exponent.
    [[nodiscard]] double operator()(double u) const;

private:
    std::vector<PowerTerm> terms_;
};

/// One sample (u, u', u'') of a traveling profile at coordinate zeta.
struct ProfilePoint {
    double zeta = 0.0;
    Complex u{};
    Complex du{};
    Complex ddu{};
};

[[nodiscard]] bool is_integer_exponent(double p) noexcept;

/// base^exponent on the reals. Integer exponents accept any base;
/// non-integer exponents require base >= 0 (DomainError otherwise).
[[nodiscard]] double real_power(double base, double exponent);

/// base^exponent for complex base. Integer exponents use exact repeated
/// multiplication; non-integer exponents are only defined on the
/// nonnegative real axis.
[[nodiscard]] Complex complex_power(Complex base, double exponent);

NormalizedParams normalize(const CbkdvParams& params);
CbkdvParams denormalize(const NormalizedParams& norm, double mu);

/// -r u + a u^(p+1) + b u^(2p+1) + c u' + u''
Complex ode_residual(const NormalizedParams& norm, const ProfilePoint& pt);

/// A real traveling profile u(zeta), valid on [zeta_min, zeta_max].
struct TravelingProfile {
    std::function<double(double)> u;
    double zeta_min = -std::numeric_limits<double>::infinity();
    double zeta_max = std::numeric_limits<double>::infinity();
};

/// |u_t + alpha u^p u_x + beta u^(2p) u_x + gamma u_xx + mu u_xxx| at (x, t)
/// for u(x, t) = profile(x - v t), all derivatives by second-order central
/// differences of step h (five-point stencil for u_xxx).
double pde_residual_traveling(const CbkdvParams& params, const TravelingProfile& profile,
                              double x, double t, double h);

/// u'' from the once-integrated generalized equation,
///
///     u'' = r u - sum_k q_k u^(e_k + 1) / (e_k + 1) - beta u^(2p+1) / (2p+1) - (gamma/mu) u'
///
/// The caller divides the coefficients q_k and beta by mu beforehand; the
/// integration factors 1/(e+1) are applied here.
double generalized_ode_rhs(const GeneralizedNonlinearity& nl, double beta_over_mu, double p,
                           double gamma_over_mu, double r, double u, double du);

}  // namespace cbkdv
