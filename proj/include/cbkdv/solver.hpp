#pragma once

// Numerical solution of the harmonic-balance system.
//
// The roots of P_m(U) = 0 come in one-parameter families U_k -> lambda^k U_k
// (translations of zeta), so U_1 is pinned to a gauge value and the
// remaining coefficients U_0, U_2..U_N are the unknowns. Each Newton step is
// the least-squares solution of J_r delta = -P, where J_r is the Jacobian
// without its U_1 column. When J_r is square and regular this is the plain
// Newton step; in FULL mode it is the Gauss-Newton step.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cbkdv/series.hpp"

namespace cbkdv {

struct SolveOptions {
    int max_iters = 200;
    double tol_residual = 1e-12;
    double damping = 0.5;
    int max_halvings = 40;
    Complex gauge{1.0, 0.0};
    int starts = 32;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument on out-of-range fields.
    void validate() const;
};

enum class StartOutcome { Converged, Stalled, IterationLimit, SingularJacobian, NonFinite };

struct SeriesSolution {
    ExpSeries coefficients;
    /// ||P(U)||_inf over the harmonics of the solved mode.
    double residual_inf = 0.0;
    /// ||J_r^H P||_inf, the gradient of ||P||^2 / 2 in the free coefficients.
    double gradient_inf = 0.0;
    TruncationMode mode = TruncationMode::Square;
    int iterations = 0;
    bool converged = false;
    StartOutcome outcome = StartOutcome::IterationLimit;
    /// Index of the start that produced this result.
    int start_index = 0;
};

/// Runs the damped iteration from a single start. U_1 of `start` is
/// replaced by the gauge.
SeriesSolution refine(const HarmonicSystem& sys, const SolveOptions& opts, ExpSeries start);

/// The k-th random start: U_1 = gauge, other coefficients uniform in the
/// complex disk of radius 2, drawn from a counter-based generator keyed by
/// (seed, k).
ExpSeries random_start(std::size_t order, const SolveOptions& opts, int start_index);

/// Multi-start solve. `initial`, when present, is start 0. The returned
/// solution is the best over all starts: converged results first, then
/// lowest residual, then lowest start index.
SeriesSolution solve(const HarmonicSystem& sys, const SolveOptions& opts,
                     const std::optional<ExpSeries>& initial = std::nullopt);

struct VerificationReport {
    /// ||P(U)||_inf over every harmonic 0..(2p+1)N.
    double residual_inf = 0.0;
    /// max |ode_residual| over the sampled profile.
    double max_ode_residual = 0.0;
};

VerificationReport verify_solution(const HarmonicSystem& sys, const ExpSeries& U,
                                   std::span<const double> zeta_samples);

/// zeta = -5, -4.5, ..., 0
std::vector<double> default_zeta_samples();

enum class SweepParameter { A, B, C, R };

/// Solves at each value of one parameter in turn, warm-starting every
/// solve from the previous solution.
std::vector<SeriesSolution> continuation_sweep(const NormalizedParams& base, SweepParameter vary,
                                               std::span<const double> values, std::size_t order,
                                               TruncationMode mode, const SolveOptions& opts);

}  // namespace cbkdv
