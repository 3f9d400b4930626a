#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "focsolve/diagnostics.hpp"
#include "focsolve/expr.hpp"
#include "focsolve/focp.hpp"
#include "focsolve/momentexp.hpp"
#include "focsolve/optim.hpp"
#include "focsolve/problem_io.hpp"
#include "focsolve/transcribe.hpp"

namespace {

struct RunArgs {
    std::string problem_path;
    int K = 3;
    int n = 100;
    std::string mode = "shooting";
    std::string out_path = "trajectory.csv";
    std::string report_path = "report.txt";
    double M2 = 1.0;
    bool M2_supplied = false;
    bool force_offset_grid = false;
    focsolve::SolveOptions options;
    std::optional<double> u_min;
    std::optional<double> u_max;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int do_run(const RunArgs& args) {
    const focsolve::Focp problem = focsolve::read_problem(args.problem_path);
    const focsolve::AugmentedSystem aug = focsolve::build_augmented(problem, args.K);
    const bool offset = args.force_offset_grid || problem.M == 0.0;
    const focsolve::Grid grid = offset ? focsolve::offset_grid(problem, args.n)
                                       : focsolve::standard_grid(problem, args.n);
    const focsolve::TranscriptionMode mode = args.mode == "full"
                                                 ? focsolve::TranscriptionMode::full
                                                 : focsolve::TranscriptionMode::shooting;
    const focsolve::DiscreteNlp nlp = focsolve::transcribe(aug, grid, mode);

    focsolve::SolveOptions options = args.options;
    if (args.u_min || args.u_max) {
        const double lo = args.u_min.value_or(-std::numeric_limits<double>::infinity());
        const double hi = args.u_max.value_or(std::numeric_limits<double>::infinity());
        options.u_bounds = std::make_pair(lo, hi);
    }
    const focsolve::SolveReport report = focsolve::solve(nlp, options);

    focsolve::write_trajectory_file(args.out_path, report.trajectory);

    focsolve::RunReportData data{
        .mode = args.mode,
        .K = args.K,
        .n = args.n,
        .offset_grid = offset,
        .solve = report,
        .M2 = args.M2,
        .M2_supplied = args.M2_supplied,
        .error_bound_value =
            focsolve::error_bound(problem.alpha, args.K, problem.a, problem.b, args.M2),
        .pontryagin = {}};
    if (mode == focsolve::TranscriptionMode::full)
        data.pontryagin = focsolve::pontryagin_check(aug, grid, report, report.multipliers);
    focsolve::write_report_file(args.report_path, data);

    std::cout << "converged = " << (report.converged ? "true" : "false")
              << "  objective = " << fmt(report.objective)
              << "  violation = " << fmt(report.max_constraint_violation)
              << "  residual = " << fmt(report.first_order_residual) << '\n'
              << "wrote " << args.out_path << " and " << args.report_path << '\n';
    return report.converged ? 0 : 2;
}

int do_compare(const std::string& traj_path, const std::string& x_ref_text,
               const std::string& u_ref_text) {
    const focsolve::Trajectory traj = focsolve::read_trajectory_file(traj_path);
    const focsolve::Expr x_ref = focsolve::parse_expr(x_ref_text);
    const focsolve::Expr u_ref = focsolve::parse_expr(u_ref_text);
    for (const auto& [expr, name] : {std::pair{x_ref, "--x-ref"}, std::pair{u_ref, "--u-ref"}})
        if (focsolve::expr_uses(expr, 'x') || focsolve::expr_uses(expr, 'u'))
            throw std::invalid_argument(std::string(name) +
                                        " must be an expression in t only");

    const int n = traj.grid.n;
    double x_sup = 0.0, x_sq = 0.0, u_sup = 0.0, u_sq = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = traj.grid.node(i);
        const double err = std::fabs(traj.x[i] - focsolve::eval_expr(x_ref, t, 0.0, 0.0));
        x_sup = std::max(x_sup, err);
        x_sq += err * err;
    }
    for (int i = 0; i < n; ++i) {
        const double t = traj.grid.node(i);
        const double err = std::fabs(traj.u[i] - focsolve::eval_expr(u_ref, t, 0.0, 0.0));
        u_sup = std::max(u_sup, err);
        u_sq += err * err;
    }
    char line[160];
    std::snprintf(line, sizeof line, "x: sup = %.12g  rms = %.12g\n", x_sup,
                  std::sqrt(x_sq / (n + 1)));
    std::cout << line;
    std::snprintf(line, sizeof line, "u: sup = %.12g  rms = %.12g\n", u_sup,
                  std::sqrt(u_sq / n));
    std::cout << line;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"direct solver for optimal control problems with mixed "
                 "integer- and fractional-order dynamics"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand(
        "run", "solve a problem file; write trajectory and report artifacts");
    run->add_option("--problem", run_args.problem_path, "problem file (key = value lines)")
        ->required();
    run->add_option("--K", run_args.K, "moment expansion depth (>= 2)")
        ->capture_default_str();
    run->add_option("--n", run_args.n, "number of time steps (>= 2)")
        ->capture_default_str();
    run->add_option("--mode", run_args.mode, "transcription mode")
        ->check(CLI::IsMember({"full", "shooting"}))
        ->capture_default_str();
    run->add_option("--out", run_args.out_path, "trajectory output path")
        ->capture_default_str();
    run->add_option("--report", run_args.report_path, "report output path")
        ->capture_default_str();
    run->add_option("--M2", run_args.M2,
                    "bound on |x''| used to scale the reported truncation bound");
    run->add_flag("--offset-grid", run_args.force_offset_grid,
                  "start the grid at a + dt (automatic when M = 0)");
    run->add_option("--outer-tol", run_args.options.outer_tol, "constraint violation target")
        ->capture_default_str();
    run->add_option("--inner-tol", run_args.options.inner_tol, "first-order residual target")
        ->capture_default_str();
    run->add_option("--max-outer", run_args.options.max_outer, "outer iteration limit")
        ->capture_default_str();
    run->add_option("--max-inner", run_args.options.max_inner,
                    "inner iterations per outer pass")
        ->capture_default_str();
    run->add_option("--penalty-init", run_args.options.penalty_init, "initial penalty weight")
        ->capture_default_str();
    run->add_option("--penalty-growth", run_args.options.penalty_growth,
                    "penalty growth factor")
        ->capture_default_str();
    double u_min = 0.0, u_max = 0.0;
    CLI::Option* u_min_opt = run->add_option("--u-min", u_min, "lower bound on the control");
    CLI::Option* u_max_opt = run->add_option("--u-max", u_max, "upper bound on the control");

    std::string traj_path, x_ref_text, u_ref_text;
    CLI::App* compare = app.add_subcommand(
        "compare", "error table of a trajectory file against reference expressions in t");
    compare->add_option("--traj", traj_path, "trajectory file from `run`")->required();
    compare->add_option("--x-ref", x_ref_text, "reference state expression x(t)")->required();
    compare->add_option("--u-ref", u_ref_text, "reference control expression u(t)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    run_args.M2_supplied = run->count("--M2") > 0;
    if (u_min_opt->count() > 0) run_args.u_min = u_min;
    if (u_max_opt->count() > 0) run_args.u_max = u_max;

    try {
        if (run->parsed()) return do_run(run_args);
        return do_compare(traj_path, x_ref_text, u_ref_text);
    } catch (const focsolve::FileError& e) {
        std::cerr << "file error: " << e.what() << '\n';
        return 1;
    } catch (const focsolve::FileFormatError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const focsolve::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 1;
    }
}
