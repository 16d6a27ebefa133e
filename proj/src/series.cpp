#include "cbkdv/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cbkdv/error.hpp"

namespace cbkdv {

namespace {

bool finite(Complex z) noexcept { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_matching_order(const HarmonicSystem& sys, const ExpSeries& U) {
    if (U.order() != sys.order()) {
        std::ostringstream msg;
        msg << "series order " << U.order() << " does not match system order " << sys.order();
        throw Error(Errc::OrderMismatch, msg.str());
    }
}

void check_exponent_range(std::size_t order, double zeta) {
    static const double log_max = std::log(std::numeric_limits<double>::max());
    if (order > 0 && zeta > 0.0 && static_cast<double>(order) * zeta > log_max) {
        std::ostringstream msg;
        msg << "e^(" << order << " * " << zeta << ") exceeds the floating-point range";
        throw Error(Errc::OverflowToInfinity, msg.str());
    }
}

}  // namespace

ExpSeries::ExpSeries(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw Error(Errc::InvalidArgument, "a series needs at least U_0");
    if (!std::all_of(coeffs_.begin(), coeffs_.end(), finite)) {
        throw Error(Errc::InvalidArgument, "series coefficients must be finite");
    }
}

void ExpSeries::set(std::size_t k, Complex value) {
    if (!finite(value)) throw Error(Errc::InvalidArgument, "series coefficients must be finite");
    coeffs_.at(k) = value;
}

ExpSeries series_product(const ExpSeries& x, const ExpSeries& y, std::size_t out_order) {
    std::vector<Complex> out(out_order + 1);
    const auto xs = x.coeffs();
    const auto ys = y.coeffs();
    for (std::size_t i = 0; i < xs.size() && i <= out_order; ++i) {
        const std::size_t jmax = std::min(ys.size() - 1, out_order - i);
        for (std::size_t j = 0; j <= jmax; ++j) out[i + j] += xs[i] * ys[j];
    }
    return ExpSeries(std::move(out));
}

ExpSeries series_power(const ExpSeries& x, unsigned m, std::size_t out_order) {
    if (m == 0) throw Error(Errc::InvalidArgument, "series_power needs m >= 1");
    // Truncating x first never changes the coefficients up to out_order.
    std::vector<Complex> base(x.coeffs().begin(),
                              x.coeffs().begin() + std::min(x.order(), out_order) + 1);
    const ExpSeries xt(std::move(base));
    ExpSeries result = xt;
    for (unsigned i = 1; i < m; ++i) result = series_product(result, xt, out_order);
    if (result.order() != out_order) {
        std::vector<Complex> padded(result.coeffs().begin(), result.coeffs().end());
        padded.resize(out_order + 1);
        result = ExpSeries(std::move(padded));
    }
    return result;
}

HarmonicSystem::HarmonicSystem(const NormalizedParams& norm, std::size_t order,
                               TruncationMode mode)
    : norm_(norm), p_(0), order_(order), mode_(mode), highest_harmonic_(order) {
    if (!(is_integer_exponent(norm.p) && norm.p >= 1.0)) {
        std::ostringstream msg;
        msg << "the series method needs a positive integer exponent, got p = " << norm.p;
        throw Error(Errc::NonIntegerExponent, msg.str());
    }
    p_ = static_cast<unsigned>(norm.p);
    if (mode == TruncationMode::Full) highest_harmonic_ = (2 * p_ + 1) * order;
}

double HarmonicSystem::linear_factor(std::size_t m) const noexcept {
    const auto mm = static_cast<double>(m);
    return mm * mm + norm_.c * mm - norm_.r;
}

HarmonicSystem build_system(const NormalizedParams& norm, std::size_t order, TruncationMode mode) {
    return {norm, order, mode};
}

std::vector<Complex> eval_system(const HarmonicSystem& sys, const ExpSeries& U) {
    require_matching_order(sys, U);
    const std::size_t M = sys.highest_harmonic();
    const auto& norm = sys.params();
    const ExpSeries low = series_power(U, sys.exponent() + 1, M);
    const ExpSeries high = series_power(U, 2 * sys.exponent() + 1, M);

    std::vector<Complex> P(M + 1);
    for (std::size_t m = 0; m <= M; ++m) {
        Complex linear{};
        if (m <= U.order()) linear = sys.linear_factor(m) * U[m];
        P[m] = linear + norm.a * low[m] + norm.b * high[m];
    }
    return P;
}

ComplexMatrix eval_jacobian(const HarmonicSystem& sys, const ExpSeries& U) {
    require_matching_order(sys, U);
    const std::size_t M = sys.highest_harmonic();
    const std::size_t N = U.order();
    const unsigned p = sys.exponent();
    const auto& norm = sys.params();

    // d(u^q)_m / dU_k = q (u^(q-1))_(m-k)
    const ExpSeries low = series_power(U, p, M);
    const ExpSeries high = series_power(U, 2 * p, M);
    const double q_low = p + 1.0;
    const double q_high = 2.0 * p + 1.0;

    ComplexMatrix J = ComplexMatrix::Zero(static_cast<Eigen::Index>(M + 1),
                                          static_cast<Eigen::Index>(N + 1));
    for (std::size_t m = 0; m <= M; ++m) {
        const auto row = static_cast<Eigen::Index>(m);
        for (std::size_t k = 0; k <= std::min(m, N); ++k) {
            const auto col = static_cast<Eigen::Index>(k);
            J(row, col) = norm.a * q_low * low[m - k] + norm.b * q_high * high[m - k];
        }
        if (m <= N) J(row, row) += sys.linear_factor(m);
    }
    return J;
}

Complex evaluate_series(const ExpSeries& U, double zeta) {
    check_exponent_range(U.order(), zeta);
    const double w = std::exp(zeta);
    const auto cs = U.coeffs();
    Complex acc = cs.back();
    for (std::size_t k = cs.size() - 1; k-- > 0;) acc = acc * w + cs[k];
    if (!finite(acc)) throw Error(Errc::OverflowToInfinity, "series value is not finite");
    return acc;
}

ProfilePoint evaluate_profile(const ExpSeries& U, double zeta) {
    check_exponent_range(U.order(), zeta);
    const double w = std::exp(zeta);
    const auto cs = U.coeffs();
    Complex u{}, du{}, ddu{};
    for (std::size_t k = cs.size(); k-- > 0;) {
        const auto kk = static_cast<double>(k);
        u = u * w + cs[k];
        du = du * w + kk * cs[k];
        ddu = ddu * w + kk * kk * cs[k];
    }
    if (!(finite(u) && finite(du) && finite(ddu))) {
        throw Error(Errc::OverflowToInfinity, "profile value is not finite");
    }
    return {zeta, u, du, ddu};
}

bool within_safe_window(std::size_t order, double zeta_min, double zeta_max) noexcept {
    return order <= kSafeWindowMaxOrder && zeta_min >= kSafeWindow.min &&
           zeta_max <= kSafeWindow.max && zeta_min <= zeta_max;
}

}  // namespace cbkdv
