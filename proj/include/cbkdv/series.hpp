#pragma once

// Truncated exponential series u(zeta) = sum_k U_k e^(k zeta) and the
// harmonic-balance system obtained by substituting it into the normalized
// traveling-wave ODE and collecting the coefficient of each e^(m zeta):
//
//     P_m(U) = (m^2 + c m - r) U_m + a (u^(p+1))_m + b (u^(2p+1))_m
//
// where (.)_m is the m-th coefficient of the exact Cauchy power.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cbkdv/model.hpp"

namespace cbkdv {

using ComplexMatrix = Eigen::MatrixXcd;

/// Coefficients U_0..U_N of sum_k U_k e^(k zeta). Always holds at least one
/// coefficient and only finite values.
class ExpSeries {
public:
    ExpSeries() : coeffs_(1) {}
    explicit ExpSeries(std::vector<Complex> coeffs);

    static ExpSeries zeros(std::size_t order) { return ExpSeries(std::vector<Complex>(order + 1)); }

    [[nodiscard]] std::size_t order() const noexcept { return coeffs_.size() - 1; }
    [[nodiscard]] std::span<const Complex> coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] const Complex& operator[](std::size_t k) const { return coeffs_[k]; }

    /// Replaces U_k; the value must be finite.
    void set(std::size_t k, Complex value);

    friend bool operator==(const ExpSeries&, const ExpSeries&) = default;

private:
    std::vector<Complex> coeffs_;
};

/// Cauchy product truncated to out_order.
ExpSeries series_product(const ExpSeries& x, const ExpSeries& y, std::size_t out_order);

/// x^m truncated to out_order (m >= 1).
ExpSeries series_power(const ExpSeries& x, unsigned m, std::size_t out_order);

/// Which harmonics are equated to zero.
enum class TruncationMode {
    Square,  ///< m = 0..N
    Full,    ///< m = 0..(2p+1)N, every harmonic the truncated ansatz produces
};

class HarmonicSystem {
public:
    HarmonicSystem(const NormalizedParams& norm, std::size_t order, TruncationMode mode);

    [[nodiscard]] const NormalizedParams& params() const noexcept { return norm_; }
    [[nodiscard]] unsigned exponent() const noexcept { return p_; }
    [[nodiscard]] std::size_t order() const noexcept { return order_; }
    [[nodiscard]] TruncationMode mode() const noexcept { return mode_; }
    [[nodiscard]] std::size_t equation_count() const noexcept { return highest_harmonic_ + 1; }
    [[nodiscard]] std::size_t highest_harmonic() const noexcept { return highest_harmonic_; }

    /// Linear factor m^2 + c m - r of harmonic m.
    [[nodiscard]] double linear_factor(std::size_t m) const noexcept;

    /// Same parameters and order with another truncation mode.
    [[nodiscard]] HarmonicSystem with_mode(TruncationMode mode) const {
        return {norm_, order_, mode};
    }

private:
    NormalizedParams norm_;
    unsigned p_;
    std::size_t order_;
    TruncationMode mode_;
    std::size_t highest_harmonic_;
};

/// Throws NonIntegerExponent unless norm.p is a positive integer.
HarmonicSystem build_system(const NormalizedParams& norm, std::size_t order, TruncationMode mode);

/// (P_0(U), ..., P_M(U)); throws OrderMismatch if U.order() != sys.order().
std::vector<Complex> eval_system(const HarmonicSystem& sys, const ExpSeries& U);

/// Analytic dP_m/dU_k, equation_count x (N+1).
ComplexMatrix eval_jacobian(const HarmonicSystem& sys, const ExpSeries& U);

/// sum_k U_k e^(k zeta) by Horner in e^zeta. Throws OverflowToInfinity when
/// the result cannot be represented.
Complex evaluate_series(const ExpSeries& U, double zeta);

/// (u, u', u'') of the series at zeta.
ProfilePoint evaluate_profile(const ExpSeries& U, double zeta);

/// Default window where a truncated series of the given order is evaluated
/// without an explicit opt-in: zeta in [-20, 3] for order <= 8, empty above.
struct ZetaWindow {
    double min;
    double max;
};
[[nodiscard]] bool within_safe_window(std::size_t order, double zeta_min, double zeta_max) noexcept;
inline constexpr ZetaWindow kSafeWindow{-20.0, 3.0};
inline constexpr std::size_t kSafeWindowMaxOrder = 8;

}  // namespace cbkdv
