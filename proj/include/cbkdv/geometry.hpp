#pragma once

// Phase surface S_u: -r X + a X^(p+1) + b X^(2p+1) + c Y + Z = 0, on which
// every solution (u, u', u'') of the normalized ODE lies, plus fixed-step
// RK4 tracing of such solutions for arbitrary p > 0.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbkdv/model.hpp"

namespace cbkdv {

/// `count` equally spaced nodes from min to max inclusive.
struct GridAxis {
    double min = 0.0;
    double max = 1.0;
    std::size_t count = 2;

    [[nodiscard]] double node(std::size_t i) const noexcept;
};

struct SurfaceSpec {
    NormalizedParams norm;
    GridAxis x;
    GridAxis y;

    /// Throws InvalidArgument for bad axes, DomainError for x.min < 0 with
    /// non-integer p.
    void validate() const;
};

struct SurfacePoint {
    double x;
    double y;
    double z;
};

/// Z = r X - a X^(p+1) - b X^(2p+1) - c Y
double surface_z(const NormalizedParams& norm, double X, double Y);

/// Row-major grid with X varying fastest.
std::vector<SurfacePoint> sample_surface(const SurfaceSpec& spec);

/// Generalized nonlinearity in the form taken by generalized_ode_rhs.
struct GeneralizedModel {
    GeneralizedNonlinearity nonlinearity;
    double beta_over_mu = 0.0;
    double p = 1.0;
    double gamma_over_mu = 0.0;
    double r = 0.0;
};

struct ZetaSpan {
    double start;
    double end;
};

enum class TraceStatus { Complete, DomainExit, BlowUp };

std::string_view to_string(TraceStatus status) noexcept;

struct Trajectory {
    std::vector<ProfilePoint> points;
    /// Signed step between consecutive nodes.
    double step = 0.0;
    /// Set for power-law traces; empty for the generalized nonlinearity.
    std::optional<NormalizedParams> params;
    TraceStatus status = TraceStatus::Complete;
};

inline constexpr double kBlowUpThreshold = 1e12;

/// Classical RK4 on (u, u') over span with |step| close to h (the span is
/// split into round(|end - start| / h) equal steps). u'' at each node is
/// taken from the right-hand side. Stops early with DomainExit (u < 0 for a
/// non-integer power) or BlowUp (|u| > 1e12 or non-finite).
Trajectory integrate_ode(const NormalizedParams& norm, double u0, double du0, ZetaSpan span,
                         double h);
Trajectory integrate_ode(const GeneralizedModel& model, double u0, double du0, ZetaSpan span,
                         double h);

struct InitialCondition {
    double u0;
    double du0;
};

struct PointCloud {
    std::vector<std::array<double, 3>> points;  // (u, u', u'')
    std::vector<TraceStatus> statuses;          // one per initial condition
};

/// Traces every initial condition and concatenates the samples in input
/// order.
PointCloud reconstruct_point_cloud(const NormalizedParams& norm,
                                   std::span<const InitialCondition> initial_conditions,
                                   ZetaSpan span, double h);

}  // namespace cbkdv
