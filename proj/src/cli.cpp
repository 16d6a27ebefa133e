#include "cbkdv/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cbkdv/error.hpp"
#include "cbkdv/geometry.hpp"
#include "cbkdv/model.hpp"

namespace cbkdv::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kDefaultVerifyZeta = "-5:0:11";
constexpr const char* kDefaultProfileZeta = "-5:0:101";

double parse_double(std::string_view text, std::string_view what) {
    // strtod would honour the global locale; from_chars does not.
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw Error(Errc::InvalidArgument,
                    "cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
    }
    return value;
}

std::uint64_t parse_seed(std::string_view text) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw Error(Errc::InvalidArgument, "seed must be an unsigned 64-bit integer");
    }
    return value;
}

std::string_view to_string(TruncationMode mode) {
    return mode == TruncationMode::Square ? "square" : "full";
}

TruncationMode parse_mode(std::string_view text) {
    if (text == "square") return TruncationMode::Square;
    if (text == "full") return TruncationMode::Full;
    throw Error(Errc::InvalidArgument, "mode must be 'square' or 'full'");
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(Errc::InvalidArgument, "cannot open output file '" + path + "'");
    file << text;
    if (!file) throw Error(Errc::InvalidArgument, "failed writing '" + path + "'");
}

std::string slurp(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw Error(Errc::InvalidArgument, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << file.rdbuf();
    return ss.str();
}

ordered_json complex_pair(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

Complex read_pair(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw Error(Errc::InvalidArgument, "complex values must be [re, im] pairs");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

struct Globals {
    std::string output;
    std::string format = "csv";
    double tol = 1e-9;
    std::optional<std::string> seed;
};

std::uint64_t resolve_seed(const Globals& g) {
    if (g.seed) return parse_seed(*g.seed);
    if (const char* env = std::getenv("CBKDV_SEED"); env != nullptr && *env != '\0') {
        return parse_seed(env);
    }
    return 0;
}

// Physical (alpha, beta, gamma, mu, v) and normalized (a, b, c, r) groups;
// at most one of them per invocation.
struct ParamArgs {
    std::optional<double> alpha, beta, gamma, mu, v, d;
    std::optional<double> a, b, c, r;
    double p = 1.0;

    [[nodiscard]] bool any_physical() const { return alpha || beta || gamma || mu || v || d; }
    [[nodiscard]] bool any_normalized() const { return a || b || c || r; }

    [[nodiscard]] CbkdvParams physical() const {
        if (!mu) throw Error(Errc::InvalidArgument, "--mu is required with physical parameters");
        return {alpha.value_or(0.0), beta.value_or(0.0), gamma.value_or(0.0), *mu,
                v.value_or(0.0),     p,                  d.value_or(0.0)};
    }

    [[nodiscard]] NormalizedParams resolve() const {
        if (any_physical() && any_normalized()) {
            throw Error(Errc::InvalidArgument,
                        "physical (--alpha/--beta/--gamma/--mu/--v) and normalized "
                        "(--a/--b/--c/--r) parameters are mutually exclusive");
        }
        if (any_physical()) return normalize(physical());
        if (!(p > 0.0 && std::isfinite(p))) {
            throw Error(Errc::InvalidExponent, "exponent p must be positive");
        }
        return {a.value_or(0.0), b.value_or(0.0), c.value_or(0.0), r.value_or(0.0), p};
    }
};

void add_physical_options(CLI::App* cmd, ParamArgs& pa) {
    cmd->add_option("--alpha", pa.alpha, "coefficient of u^p u_x");
    cmd->add_option("--beta", pa.beta, "coefficient of u^(2p) u_x");
    cmd->add_option("--gamma", pa.gamma, "dissipation coefficient");
    cmd->add_option("--mu", pa.mu, "dispersion coefficient (nonzero)");
    cmd->add_option("--v", pa.v, "wave velocity");
    cmd->add_option("--d", pa.d, "integration constant (only 0 is supported)");
}

void add_param_options(CLI::App* cmd, ParamArgs& pa) {
    add_physical_options(cmd, pa);
    cmd->add_option("--a", pa.a, "normalized a");
    cmd->add_option("--b", pa.b, "normalized b");
    cmd->add_option("--c", pa.c, "normalized c");
    cmd->add_option("--r", pa.r, "normalized r");
    cmd->add_option("--p", pa.p, "nonlinearity exponent")->required();
}

ordered_json params_json(const NormalizedParams& n) {
    ordered_json j;
    j["a"] = n.a;
    j["b"] = n.b;
    j["c"] = n.c;
    j["r"] = n.r;
    j["p"] = n.p;
    return j;
}

// ---------------------------------------------------------------------------

int cmd_normalize(const ParamArgs& pa, const Globals& g, std::ostream& out) {
    if (pa.any_normalized()) {
        throw Error(Errc::InvalidArgument, "normalize takes physical parameters only");
    }
    const NormalizedParams n = normalize(pa.physical());
    std::string text;
    if (g.format == "json") {
        text = params_json(n).dump() + "\n";
    } else {
        text = "a=" + format_double(n.a) + " b=" + format_double(n.b) + " c=" + format_double(n.c) +
               " r=" + format_double(n.r) + "\n";
    }
    emit(text, g.output, out);
    return kOk;
}

struct SolveArgs {
    std::size_t order = 1;
    std::string mode = "square";
    int starts = 32;
    int max_iters = 200;
    double tol_residual = 1e-12;
    double gauge_re = 1.0;
    double gauge_im = 0.0;
};

int cmd_solve(const ParamArgs& pa, const SolveArgs& sa, const Globals& g, std::ostream& out,
              std::ostream& err) {
    const NormalizedParams norm = pa.resolve();
    if (sa.order < 1) throw Error(Errc::InvalidArgument, "--order must be >= 1");
    const HarmonicSystem sys = build_system(norm, sa.order, parse_mode(sa.mode));

    SolveOptions opts;
    opts.starts = sa.starts;
    opts.max_iters = sa.max_iters;
    opts.tol_residual = sa.tol_residual;
    opts.gauge = {sa.gauge_re, sa.gauge_im};
    opts.seed = resolve_seed(g);

    const SeriesSolution sol = solve(sys, opts);
    const auto samples = parse_range(kDefaultVerifyZeta).nodes();
    const VerificationReport report = verify_solution(sys, sol.coefficients, samples);

    SolutionFile file;
    file.params = norm;
    file.order = sa.order;
    file.mode = sys.mode();
    file.gauge = opts.gauge;
    file.coefficients = sol.coefficients;
    file.residual_inf = sol.residual_inf;
    file.full_residual_inf = report.residual_inf;
    file.ode_residual_max = report.max_ode_residual;
    file.converged = sol.converged;
    file.iterations = sol.iterations;
    file.seed = opts.seed;
    emit(write_solution_json(file), g.output, out);

    std::ostream& summary = g.output.empty() ? err : out;
    summary << "solve: mode=" << to_string(sys.mode()) << " order=" << sa.order
            << " converged=" << (sol.converged ? "true" : "false")
            << " residual_inf=" << format_double(sol.residual_inf)
            << " ode_residual_max=" << format_double(report.max_ode_residual)
            << " iterations=" << sol.iterations << " start=" << sol.start_index << "\n";
    return sol.converged ? kOk : kNoConvergence;
}

struct VerifyArgs {
    std::string solution;
    std::string zeta = kDefaultVerifyZeta;
    bool report_only = false;
};

int cmd_verify(const VerifyArgs& va, const Globals& g, std::ostream& out) {
    const SolutionFile file = read_solution_json(slurp(va.solution));
    const HarmonicSystem sys = build_system(file.params, file.order, file.mode);
    const auto samples = parse_range(va.zeta).nodes();
    const VerificationReport report = verify_solution(sys, file.coefficients, samples);

    const double tol = va.report_only ? std::numeric_limits<double>::infinity() : g.tol;
    const bool pass = report.residual_inf <= tol && report.max_ode_residual <= tol;
    std::string text = "residual_inf=" + format_double(report.residual_inf) +
                       " ode_residual_max=" + format_double(report.max_ode_residual) +
                       " status=" + (va.report_only ? "report" : (pass ? "pass" : "fail")) + "\n";
    emit(text, g.output, out);
    return pass ? kOk : kVerifyFailed;
}

struct SurfaceArgs {
    std::string x;
    std::string y;
};

int cmd_surface(const ParamArgs& pa, const SurfaceArgs& sa, const Globals& g, std::ostream& out) {
    const RangeSpec xr = parse_range(sa.x);
    const RangeSpec yr = parse_range(sa.y);
    const SurfaceSpec spec{pa.resolve(), {xr.min, xr.max, xr.count}, {yr.min, yr.max, yr.count}};
    const auto grid = sample_surface(spec);

    std::string text;
    if (g.format == "json") {
        ordered_json rows = ordered_json::array();
        for (const auto& pt : grid) rows.push_back({{"x", pt.x}, {"y", pt.y}, {"z", pt.z}});
        text = rows.dump() + "\n";
    } else {
        text.reserve(grid.size() * 64);
        text += "x,y,z\n";
        for (const auto& pt : grid) {
            text += format_double(pt.x) + "," + format_double(pt.y) + "," + format_double(pt.z) +
                    "\n";
        }
    }
    emit(text, g.output, out);
    return kOk;
}

struct TraceArgs {
    double u0 = 0.0;
    double du0 = 0.0;
    std::string span = "0:1";
    double h = 1e-3;
};

int cmd_trace(const ParamArgs& pa, const TraceArgs& ta, const Globals& g, std::ostream& out) {
    const auto colon = ta.span.find(':');
    if (colon == std::string::npos) throw Error(Errc::InvalidArgument, "--span must be start:end");
    const ZetaSpan span{parse_double(std::string_view(ta.span).substr(0, colon), "span start"),
                        parse_double(std::string_view(ta.span).substr(colon + 1), "span end")};
    const Trajectory traj = integrate_ode(pa.resolve(), ta.u0, ta.du0, span, ta.h);

    std::string text;
    if (g.format == "json") {
        ordered_json j;
        j["status"] = std::string(to_string(traj.status));
        j["step"] = traj.step;
        j["points"] = ordered_json::array();
        for (const auto& pt : traj.points) {
            j["points"].push_back({pt.zeta, pt.u.real(), pt.du.real(), pt.ddu.real()});
        }
        text = j.dump() + "\n";
    } else {
        text += "zeta,u,du,ddu\n";
        for (const auto& pt : traj.points) {
            text += format_double(pt.zeta) + "," + format_double(pt.u.real()) + "," +
                    format_double(pt.du.real()) + "," + format_double(pt.ddu.real()) + "\n";
        }
        text += "# exit: " + std::string(to_string(traj.status)) + "\n";
    }
    emit(text, g.output, out);
    return kOk;
}

struct ProfileArgs {
    std::string solution;
    std::string zeta = kDefaultProfileZeta;
    bool allow_unsafe = false;
};

int cmd_profile(const ProfileArgs& pa, const Globals& g, std::ostream& out) {
    const SolutionFile file = read_solution_json(slurp(pa.solution));
    const RangeSpec range = parse_range(pa.zeta);
    if (!pa.allow_unsafe && !within_safe_window(file.order, range.min, range.max)) {
        std::ostringstream msg;
        msg << "zeta range [" << range.min << ", " << range.max << "] at order " << file.order
            << " is outside the safe window [" << kSafeWindow.min << ", " << kSafeWindow.max
            << "] (order <= " << kSafeWindowMaxOrder << "); pass --allow-unsafe-range to override";
        throw Error(Errc::InvalidArgument, msg.str());
    }

    std::string text;
    if (g.format == "json") {
        ordered_json rows = ordered_json::array();
        for (double z : range.nodes()) {
            const ProfilePoint pt = evaluate_profile(file.coefficients, z);
            rows.push_back({z, pt.u.real(), pt.u.imag(), pt.du.real(), pt.du.imag()});
        }
        text = rows.dump() + "\n";
    } else {
        text += "zeta,re_u,im_u,re_du,im_du\n";
        for (double z : range.nodes()) {
            const ProfilePoint pt = evaluate_profile(file.coefficients, z);
            text += format_double(z) + "," + format_double(pt.u.real()) + "," +
                    format_double(pt.u.imag()) + "," + format_double(pt.du.real()) + "," +
                    format_double(pt.du.imag()) + "\n";
        }
    }
    emit(text, g.output, out);
    return kOk;
}

}  // namespace

std::vector<double> RangeSpec::nodes() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) {
        v[i] = (count == 1 || i + 1 == count)
                   ? (count == 1 ? min : max)
                   : min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return v;
}

RangeSpec parse_range(std::string_view text) {
    const auto first = text.find(':');
    const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
    if (second == std::string_view::npos || text.find(':', second + 1) != std::string_view::npos) {
        throw Error(Errc::InvalidArgument,
                    "range must be min:max:count, got '" + std::string(text) + "'");
    }
    RangeSpec r{};
    r.min = parse_double(text.substr(0, first), "range min");
    r.max = parse_double(text.substr(first + 1, second - first - 1), "range max");
    const auto count_text = text.substr(second + 1);
    const auto [ptr, ec] =
        std::from_chars(count_text.data(), count_text.data() + count_text.size(), r.count);
    if (ec != std::errc{} || ptr != count_text.data() + count_text.size() || count_text.empty()) {
        throw Error(Errc::InvalidArgument, "range count must be a nonnegative integer");
    }
    if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.count == 0 ||
        (r.count > 1 && !(r.min < r.max)) || (r.count == 1 && r.min != r.max)) {
        throw Error(Errc::InvalidArgument, "range needs min < max and count >= 1 (count 1 iff min == max)");
    }
    return r;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string write_solution_json(const SolutionFile& f) {
    ordered_json j;
    j["params"] = params_json(f.params);
    j["order"] = f.order;
    j["mode"] = std::string(to_string(f.mode));
    j["gauge"] = complex_pair(f.gauge);
    j["coefficients"] = ordered_json::array();
    for (const auto& z : f.coefficients.coeffs()) j["coefficients"].push_back(complex_pair(z));
    j["residual_inf"] = f.residual_inf;
    j["full_residual_inf"] = f.full_residual_inf;
    j["ode_residual_max"] = f.ode_residual_max;
    j["converged"] = f.converged;
    j["iterations"] = f.iterations;
    j["seed"] = f.seed;
    return j.dump(2) + "\n";
}

SolutionFile read_solution_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("malformed solution file: ") + e.what());
    }
    try {
        SolutionFile f;
        const auto& p = j.at("params");
        f.params = {p.at("a").get<double>(), p.at("b").get<double>(), p.at("c").get<double>(),
                    p.at("r").get<double>(), p.at("p").get<double>()};
        f.order = j.at("order").get<std::size_t>();
        if (j.contains("mode")) f.mode = parse_mode(j["mode"].get<std::string>());
        if (j.contains("gauge")) f.gauge = read_pair(j["gauge"]);
        const auto& cs = j.at("coefficients");
        if (!cs.is_array() || cs.size() != f.order + 1) {
            throw Error(Errc::InvalidArgument, "coefficients must hold order + 1 pairs");
        }
        std::vector<Complex> coeffs;
        for (const auto& c : cs) coeffs.push_back(read_pair(c));
        f.coefficients = ExpSeries(std::move(coeffs));
        f.residual_inf = j.value("residual_inf", 0.0);
        f.full_residual_inf = j.value("full_residual_inf", 0.0);
        f.ode_residual_max = j.value("ode_residual_max", 0.0);
        f.converged = j.value("converged", false);
        f.iterations = j.value("iterations", 0);
        f.seed = j.value("seed", std::uint64_t{0});
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::InvalidArgument, std::string("malformed solution file: ") + e.what());
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Traveling solitary waves of the compound Burgers-KdV equation", "cbkdv"};
    app.set_help_flag("--help", "print help");  // -h would shadow trace --h
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--output,-o", g.output, "output file (default: stdout)");
    app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--tol", g.tol, "verification tolerance");
    app.add_option("--seed", g.seed, "multi-start seed (default: $CBKDV_SEED or 0)");

    ParamArgs norm_args;
    auto* normalize_cmd = app.add_subcommand("normalize", "physical -> normalized parameters");
    add_physical_options(normalize_cmd, norm_args);
    normalize_cmd->add_option("--p", norm_args.p, "nonlinearity exponent")->required();

    ParamArgs solve_params;
    SolveArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "solve the harmonic-balance system");
    add_param_options(solve_cmd, solve_params);
    solve_cmd->add_option("--order,-N", solve_args.order, "series order N")->required();
    solve_cmd->add_option("--mode", solve_args.mode, "square or full")
        ->check(CLI::IsMember({"square", "full"}));
    solve_cmd->add_option("--starts", solve_args.starts, "number of starts");
    solve_cmd->add_option("--max-iters", solve_args.max_iters, "iterations per start");
    solve_cmd->add_option("--tol-residual", solve_args.tol_residual, "convergence tolerance");
    solve_cmd->add_option("--gauge-re", solve_args.gauge_re, "real part of the pinned U_1");
    solve_cmd->add_option("--gauge-im", solve_args.gauge_im, "imaginary part of the pinned U_1");

    VerifyArgs verify_args;
    auto* verify_cmd = app.add_subcommand("verify", "residuals of a solution file");
    verify_cmd->add_option("solution,--solution", verify_args.solution, "solution JSON")->required();
    verify_cmd->add_option("--zeta", verify_args.zeta, "sample range min:max:count");
    verify_cmd->add_flag("--report-only", verify_args.report_only, "print residuals, always exit 0");

    ParamArgs surface_params;
    SurfaceArgs surface_args;
    auto* surface_cmd = app.add_subcommand("surface", "sample the phase surface on a grid");
    add_param_options(surface_cmd, surface_params);
    surface_cmd->add_option("--x", surface_args.x, "X range min:max:count")->required();
    surface_cmd->add_option("--y", surface_args.y, "Y range min:max:count")->required();

    ParamArgs trace_params;
    TraceArgs trace_args;
    auto* trace_cmd = app.add_subcommand("trace", "integrate the traveling-wave ODE with RK4");
    add_param_options(trace_cmd, trace_params);
    trace_cmd->add_option("--u0", trace_args.u0, "initial u");
    trace_cmd->add_option("--du0", trace_args.du0, "initial u'");
    trace_cmd->add_option("--span", trace_args.span, "start:end");
    trace_cmd->add_option("--h", trace_args.h, "step size");

    ProfileArgs profile_args;
    auto* profile_cmd = app.add_subcommand("profile", "evaluate a solution file along zeta");
    profile_cmd->add_option("solution,--solution", profile_args.solution, "solution JSON")
        ->required();
    profile_cmd->add_option("--zeta", profile_args.zeta, "range min:max:count");
    profile_cmd->add_flag("--allow-unsafe-range", profile_args.allow_unsafe,
                          "evaluate outside the safe zeta window");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*normalize_cmd) return cmd_normalize(norm_args, g, out);
        if (*solve_cmd) return cmd_solve(solve_params, solve_args, g, out, err);
        if (*verify_cmd) return cmd_verify(verify_args, g, out);
        if (*surface_cmd) return cmd_surface(surface_params, surface_args, g, out);
        if (*trace_cmd) return cmd_trace(trace_params, trace_args, g, out);
        if (*profile_cmd) return cmd_profile(profile_args, g, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace cbkdv::cli
