#include "cbkdv/geometry.hpp"

#include <cmath>
#include <future>
#include <sstream>

#include "cbkdv/error.hpp"

namespace cbkdv {

namespace {

void require_axis(const GridAxis& axis, const char* name) {
    if (axis.count < 2 || !(axis.min < axis.max) || !std::isfinite(axis.min) ||
        !std::isfinite(axis.max)) {
        std::ostringstream msg;
        msg << name << " axis needs min < max and at least 2 nodes";
        throw Error(Errc::InvalidArgument, msg.str());
    }
}

template <class Rhs>
Trajectory trace(const Rhs& rhs, bool nonnegative_only, double u0, double du0, ZetaSpan span,
                 double h) {
    if (!(h > 0.0 && std::isfinite(h))) {
        throw Error(Errc::StepSizeInvalid, "step must be positive and finite");
    }
    if (!(std::isfinite(span.start) && std::isfinite(span.end))) {
        throw Error(Errc::StepSizeInvalid, "span must be finite");
    }
    const double length = span.end - span.start;
    const auto steps = static_cast<long long>(std::llround(std::abs(length) / h));
    if (steps == 0 && length != 0.0) {
        throw Error(Errc::StepSizeInvalid, "step is larger than the span");
    }

    Trajectory out;
    out.step = steps == 0 ? 0.0 : length / static_cast<double>(steps);
    out.points.reserve(static_cast<std::size_t>(steps) + 1);

    auto in_domain = [&](double u) { return !nonnegative_only || u >= 0.0; };
    auto bounded = [](double u, double du) {
        return std::isfinite(u) && std::isfinite(du) && std::abs(u) <= kBlowUpThreshold;
    };
    // Returns false and sets the status when the state cannot be emitted.
    auto emit = [&](double zeta, double u, double du) {
        if (!bounded(u, du)) {
            out.status = TraceStatus::BlowUp;
            return false;
        }
        if (!in_domain(u)) {
            out.status = TraceStatus::DomainExit;
            return false;
        }
        out.points.push_back({zeta, u, du, rhs(u, du)});
        return true;
    };

    double u = u0;
    double du = du0;
    if (!emit(span.start, u, du)) return out;

    const double s = out.step;
    for (long long i = 0; i < steps; ++i) {
        const double k1u = du;
        const double k1v = rhs(u, du);

        const double u2 = u + 0.5 * s * k1u;
        const double v2 = du + 0.5 * s * k1v;
        if (!in_domain(u2)) return out.status = TraceStatus::DomainExit, out;
        const double k2u = v2;
        const double k2v = rhs(u2, v2);

        const double u3 = u + 0.5 * s * k2u;
        const double v3 = du + 0.5 * s * k2v;
        if (!in_domain(u3)) return out.status = TraceStatus::DomainExit, out;
        const double k3u = v3;
        const double k3v = rhs(u3, v3);

        const double u4 = u + s * k3u;
        const double v4 = du + s * k3v;
        if (!in_domain(u4)) return out.status = TraceStatus::DomainExit, out;
        const double k4u = v4;
        const double k4v = rhs(u4, v4);

        u += s / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += s / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

        const double zeta =
            i + 1 == steps ? span.end : span.start + static_cast<double>(i + 1) * s;
        if (!emit(zeta, u, du)) return out;
    }
    return out;
}

}  // namespace

double GridAxis::node(std::size_t i) const noexcept {
    if (i + 1 >= count) return max;
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

void SurfaceSpec::validate() const {
    require_axis(x, "x");
    require_axis(y, "y");
    if (!(norm.p > 0.0 && std::isfinite(norm.p))) {
        throw Error(Errc::InvalidExponent, "exponent p must be positive");
    }
    if (!is_integer_exponent(norm.p) && x.min < 0.0) {
        std::ostringstream msg;
        msg << "x range starts at " << x.min << " but p = " << norm.p
            << " is not an integer; X must be >= 0";
        throw Error(Errc::DomainError, msg.str());
    }
}

double surface_z(const NormalizedParams& norm, double X, double Y) {
    return norm.r * X - norm.a * real_power(X, norm.p + 1.0) -
           norm.b * real_power(X, 2.0 * norm.p + 1.0) - norm.c * Y;
}

std::vector<SurfacePoint> sample_surface(const SurfaceSpec& spec) {
    spec.validate();
    std::vector<SurfacePoint> grid;
    grid.reserve(spec.x.count * spec.y.count);
    for (std::size_t j = 0; j < spec.y.count; ++j) {
        const double Y = spec.y.node(j);
        for (std::size_t i = 0; i < spec.x.count; ++i) {
            const double X = spec.x.node(i);
            const double Z = surface_z(spec.norm, X, Y);
            if (!std::isfinite(Z)) {
                std::ostringstream msg;
                msg << "surface value at (" << X << ", " << Y << ") is not finite";
                throw Error(Errc::DomainError, msg.str());
            }
            grid.push_back({X, Y, Z});
        }
    }
    return grid;
}

std::string_view to_string(TraceStatus status) noexcept {
    switch (status) {
    case TraceStatus::Complete: return "complete";
    case TraceStatus::DomainExit: return "domain_exit";
    case TraceStatus::BlowUp: return "blowup";
    }
    return "unknown";
}

Trajectory integrate_ode(const NormalizedParams& norm, double u0, double du0, ZetaSpan span,
                         double h) {
    if (!(norm.p > 0.0 && std::isfinite(norm.p))) {
        throw Error(Errc::InvalidExponent, "exponent p must be positive");
    }
    const double e1 = norm.p + 1.0;
    const double e2 = 2.0 * norm.p + 1.0;
    auto rhs = [&](double u, double du) {
        return norm.r * u - norm.a * std::pow(u, e1) - norm.b * std::pow(u, e2) - norm.c * du;
    };
    Trajectory t = trace(rhs, !is_integer_exponent(norm.p), u0, du0, span, h);
    t.params = norm;
    return t;
}

Trajectory integrate_ode(const GeneralizedModel& model, double u0, double du0, ZetaSpan span,
                         double h) {
    if (!(model.p > 0.0 && std::isfinite(model.p))) {
        throw Error(Errc::InvalidExponent, "exponent p must be positive");
    }
    const bool nonnegative_only =
        model.nonlinearity.has_non_integer_exponent() || !is_integer_exponent(model.p);
    auto rhs = [&](double u, double du) {
        return generalized_ode_rhs(model.nonlinearity, model.beta_over_mu, model.p,
                                   model.gamma_over_mu, model.r, u, du);
    };
    return trace(rhs, nonnegative_only, u0, du0, span, h);
}

PointCloud reconstruct_point_cloud(const NormalizedParams& norm,
                                   std::span<const InitialCondition> initial_conditions,
                                   ZetaSpan span, double h) {
    std::vector<std::future<Trajectory>> jobs;
    jobs.reserve(initial_conditions.size());
    for (const auto& ic : initial_conditions) {
        jobs.push_back(std::async(std::launch::deferred | std::launch::async,
                                  [&norm, ic, span, h] {
                                      return integrate_ode(norm, ic.u0, ic.du0, span, h);
                                  }));
    }
    PointCloud cloud;
    for (auto& job : jobs) {
        const Trajectory t = job.get();
        cloud.statuses.push_back(t.status);
        for (const auto& pt : t.points) {
            cloud.points.push_back({pt.u.real(), pt.du.real(), pt.ddu.real()});
        }
    }
    return cloud;
}

}  // namespace cbkdv
