#include "cbkdv/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <thread>

#include <Eigen/QR>

#include "cbkdv/error.hpp"

namespace cbkdv {

namespace {

using ComplexVector = Eigen::VectorXcd;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in [0, 1) as a pure function of (seed, counter).
double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept {
    return static_cast<double>(splitmix64(seed ^ splitmix64(counter)) >> 11) * 0x1.0p-53;
}

double inf_norm(std::span<const Complex> v) {
    double m = 0.0;
    for (const auto& z : v) {
        const double a = std::abs(z);
        if (std::isnan(a)) return a;
        m = std::max(m, a);
    }
    return m;
}

double squared_norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s;
}

bool all_finite(std::span<const Complex> v) {
    return std::all_of(v.begin(), v.end(), [](Complex z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

// Free coefficient indices: everything but the gauge-pinned U_1.
std::vector<std::size_t> free_indices(std::size_t order) {
    std::vector<std::size_t> idx{0};
    for (std::size_t k = 2; k <= order; ++k) idx.push_back(k);
    return idx;
}

double reduced_gradient_inf(const HarmonicSystem& sys, const ExpSeries& U,
                            const std::vector<std::size_t>& free) {
    const auto P = eval_system(sys, U);
    const ComplexMatrix J = eval_jacobian(sys, U);
    const Eigen::Map<const ComplexVector> Pv(P.data(), static_cast<Eigen::Index>(P.size()));
    double g = 0.0;
    for (std::size_t k : free) {
        g = std::max(g, std::abs(J.col(static_cast<Eigen::Index>(k)).dot(Pv)));
    }
    return g;
}

bool better(const SeriesSolution& x, const SeriesSolution& y) {
    if (x.converged != y.converged) return x.converged;
    const bool xnan = std::isnan(x.residual_inf);
    const bool ynan = std::isnan(y.residual_inf);
    if (xnan != ynan) return ynan;
    if (!xnan && x.residual_inf != y.residual_inf) return x.residual_inf < y.residual_inf;
    return x.start_index < y.start_index;
}

}  // namespace

void SolveOptions::validate() const {
    if (!(tol_residual > 0.0)) throw Error(Errc::InvalidArgument, "tol_residual must be > 0");
    if (!(damping > 0.0 && damping < 1.0)) {
        throw Error(Errc::InvalidArgument, "damping must lie in (0, 1)");
    }
    if (starts < 1) throw Error(Errc::InvalidArgument, "starts must be >= 1");
    if (max_iters < 0 || max_halvings < 0) {
        throw Error(Errc::InvalidArgument, "iteration limits must be nonnegative");
    }
    if (!(std::isfinite(gauge.real()) && std::isfinite(gauge.imag()))) {
        throw Error(Errc::InvalidArgument, "gauge must be finite");
    }
}

SeriesSolution refine(const HarmonicSystem& sys, const SolveOptions& opts, ExpSeries start) {
    opts.validate();
    if (sys.order() < 1) throw Error(Errc::InvalidArgument, "gauge fixing needs order >= 1");
    if (start.order() != sys.order()) {
        throw Error(Errc::OrderMismatch, "start order does not match system order");
    }

    const auto free = free_indices(sys.order());
    const auto n_free = static_cast<Eigen::Index>(free.size());
    ExpSeries U = std::move(start);
    U.set(1, opts.gauge);

    SeriesSolution out{.coefficients = U, .mode = sys.mode()};
    for (int iter = 0;; ++iter) {
        const auto P = eval_system(sys, U);
        const ComplexMatrix J = eval_jacobian(sys, U);
        ComplexMatrix Jr(J.rows(), n_free);
        for (Eigen::Index j = 0; j < n_free; ++j) {
            Jr.col(j) = J.col(static_cast<Eigen::Index>(free[static_cast<std::size_t>(j)]));
        }
        const Eigen::Map<const ComplexVector> Pv(P.data(), static_cast<Eigen::Index>(P.size()));
        const ComplexVector grad = Jr.adjoint() * Pv;

        out.coefficients = U;
        out.iterations = iter;
        out.residual_inf = inf_norm(P);
        out.gradient_inf = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;

        if (!all_finite(P) || !std::isfinite(out.gradient_inf)) {
            out.outcome = StartOutcome::NonFinite;
            return out;
        }
        const double measure =
            sys.mode() == TruncationMode::Square ? out.residual_inf : out.gradient_inf;
        if (measure <= opts.tol_residual) {
            out.converged = true;
            out.outcome = StartOutcome::Converged;
            return out;
        }
        if (iter >= opts.max_iters) {
            out.outcome = StartOutcome::IterationLimit;
            return out;
        }

        const Eigen::ColPivHouseholderQR<ComplexMatrix> qr(Jr);
        if (qr.rank() < n_free) {
            out.outcome = StartOutcome::SingularJacobian;
            return out;
        }
        const ComplexVector delta = qr.solve(-Pv);

        const double merit = squared_norm(P);
        double step = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h, step *= opts.damping) {
            ExpSeries trial = U;
            bool ok = true;
            for (Eigen::Index j = 0; j < n_free && ok; ++j) {
                const std::size_t k = free[static_cast<std::size_t>(j)];
                const Complex next = U[k] + step * delta(j);
                ok = std::isfinite(next.real()) && std::isfinite(next.imag());
                if (ok) trial.set(k, next);
            }
            if (!ok) continue;
            const auto trial_P = eval_system(sys, trial);
            const double trial_merit = squared_norm(trial_P);
            if (std::isfinite(trial_merit) && trial_merit < merit) {
                U = std::move(trial);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // Near a nonzero least-squares minimum the merit stops resolving
            // progress before the gradient does. Take the full step if the
            // merit is flat to rounding and the gradient shrinks.
            ExpSeries trial = U;
            for (Eigen::Index j = 0; j < n_free; ++j) {
                const std::size_t k = free[static_cast<std::size_t>(j)];
                const Complex next = U[k] + delta(j);
                if (std::isfinite(next.real()) && std::isfinite(next.imag())) trial.set(k, next);
            }
            const auto trial_P = eval_system(sys, trial);
            const double trial_merit = squared_norm(trial_P);
            if (std::isfinite(trial_merit) &&
                trial_merit <= merit * (1.0 + 64.0 * std::numeric_limits<double>::epsilon()) &&
                reduced_gradient_inf(sys, trial, free) < out.gradient_inf) {
                U = std::move(trial);
                accepted = true;
            }
        }
        if (!accepted) {
            out.outcome = StartOutcome::Stalled;
            return out;
        }
    }
}

ExpSeries random_start(std::size_t order, const SolveOptions& opts, int start_index) {
    ExpSeries U = ExpSeries::zeros(order);
    const std::uint64_t base = static_cast<std::uint64_t>(start_index) * 2 * (order + 1);
    for (std::size_t k = 0; k <= order; ++k) {
        const double radius = 2.0 * std::sqrt(counter_uniform(opts.seed, base + 2 * k));
        const double angle = 2.0 * std::numbers::pi * counter_uniform(opts.seed, base + 2 * k + 1);
        U.set(k, std::polar(radius, angle));
    }
    if (order >= 1) U.set(1, opts.gauge);
    return U;
}

SeriesSolution solve(const HarmonicSystem& sys, const SolveOptions& opts,
                     const std::optional<ExpSeries>& initial) {
    opts.validate();
    if (sys.order() < 1) throw Error(Errc::InvalidArgument, "gauge fixing needs order >= 1");
    if (initial && initial->order() != sys.order()) {
        throw Error(Errc::OrderMismatch, "initial guess order does not match system order");
    }

    auto run_start = [&](int index) {
        ExpSeries start = (index == 0 && initial) ? *initial : random_start(sys.order(), opts, index);
        SeriesSolution s = refine(sys, opts, std::move(start));
        s.start_index = index;
        return s;
    };

    // Each start is independent; the reduction below only depends on the
    // per-start results, never on completion order.
    const int workers = std::max(1, std::min<int>(opts.starts,
                                                  static_cast<int>(std::thread::hardware_concurrency())));
    std::vector<SeriesSolution> results(static_cast<std::size_t>(opts.starts));
    if (workers == 1) {
        for (int i = 0; i < opts.starts; ++i) results[static_cast<std::size_t>(i)] = run_start(i);
    } else {
        std::vector<std::future<void>> jobs;
        for (int w = 0; w < workers; ++w) {
            jobs.push_back(std::async(std::launch::async, [&, w] {
                for (int i = w; i < opts.starts; i += workers) {
                    results[static_cast<std::size_t>(i)] = run_start(i);
                }
            }));
        }
        for (auto& j : jobs) j.get();
    }

    const auto best = std::min_element(results.begin(), results.end(), better);
    return *best;
}

VerificationReport verify_solution(const HarmonicSystem& sys, const ExpSeries& U,
                                   std::span<const double> zeta_samples) {
    const HarmonicSystem full = sys.with_mode(TruncationMode::Full);
    VerificationReport report;
    report.residual_inf = inf_norm(eval_system(full, U));
    for (double zeta : zeta_samples) {
        const double r = std::abs(ode_residual(sys.params(), evaluate_profile(U, zeta)));
        report.max_ode_residual = std::max(report.max_ode_residual, r);
    }
    return report;
}

std::vector<double> default_zeta_samples() {
    std::vector<double> z;
    for (int i = 0; i <= 10; ++i) z.push_back(-5.0 + 0.5 * i);
    return z;
}

std::vector<SeriesSolution> continuation_sweep(const NormalizedParams& base, SweepParameter vary,
                                               std::span<const double> values, std::size_t order,
                                               TruncationMode mode, const SolveOptions& opts) {
    if (values.empty()) throw Error(Errc::InvalidArgument, "sweep needs at least one value");
    std::vector<SeriesSolution> out;
    out.reserve(values.size());
    std::optional<ExpSeries> previous;
    for (double value : values) {
        NormalizedParams norm = base;
        switch (vary) {
        case SweepParameter::A: norm.a = value; break;
        case SweepParameter::B: norm.b = value; break;
        case SweepParameter::C: norm.c = value; break;
        case SweepParameter::R: norm.r = value; break;
        }
        const HarmonicSystem sys = build_system(norm, order, mode);
        out.push_back(solve(sys, opts, previous));
        previous = out.back().coefficients;
    }
    return out;
}

}  // namespace cbkdv
