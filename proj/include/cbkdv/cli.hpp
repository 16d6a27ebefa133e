#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cbkdv/series.hpp"
#include "cbkdv/solver.hpp"

namespace cbkdv::cli {

enum ExitCode : int {
    kOk = 0,
    kVerifyFailed = 1,
    kUsage = 2,
    kNoConvergence = 3,
};

/// `min:max:count`, count being the number of nodes.
struct RangeSpec {
    double min;
    double max;
    std::size_t count;

    [[nodiscard]] std::vector<double> nodes() const;
};

/// Throws cbkdv::Error(InvalidArgument) on malformed text.
RangeSpec parse_range(std::string_view text);

/// 17 significant digits, C locale. Round-trips every finite double.
std::string format_double(double x);

/// Contents of a solution file.
struct SolutionFile {
    NormalizedParams params;
    std::size_t order = 0;
    TruncationMode mode = TruncationMode::Square;
    Complex gauge{1.0, 0.0};
    ExpSeries coefficients;
    double residual_inf = 0.0;
    double full_residual_inf = 0.0;
    double ode_residual_max = 0.0;
    bool converged = false;
    int iterations = 0;
    std::uint64_t seed = 0;
};

std::string write_solution_json(const SolutionFile& file);

/// Only params, order and coefficients are required; throws
/// cbkdv::Error(InvalidArgument) on malformed input.
SolutionFile read_solution_json(std::string_view text);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cbkdv::cli
