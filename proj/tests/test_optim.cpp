#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "focsolve/focp.hpp"
#include "focsolve/optim.hpp"
#include "focsolve/transcribe.hpp"

using focsolve::AugmentedSystem;
using focsolve::build_augmented;
using focsolve::DiscreteNlp;
using focsolve::Focp;
using focsolve::FractionalOrder;
using focsolve::Grid;
using focsolve::parse_expr;
using focsolve::SolveOptions;
using focsolve::SolveReport;
using focsolve::solve;
using focsolve::standard_grid;
using focsolve::Trajectory;
using focsolve::transcribe;
using focsolve::TranscriptionMode;

namespace {

Focp benchmark() {
    return Focp(FractionalOrder(0.5), 1.0, 1.0, 0.0, 1.0, 0.0, 1.0,
                parse_expr("(u^2 - 4*x)^2"),
                parse_expr("u + (2/gamma(2.5)) * t^1.5"));
}

void check_report_invariants(const SolveReport& r, const SolveOptions& opts) {
    if (r.converged) {
        CHECK(r.max_constraint_violation <= opts.outer_tol);
        CHECK(r.first_order_residual <= 10.0 * opts.inner_tol);
    }
    CHECK(r.outer_iterations >= 1);
    CHECK(r.outer_iterations <= opts.max_outer);
}

}  // namespace

TEST_CASE("an unconstrained quadratic reaches its minimizer within three inner iterations") {
    // Shooting mode with f = 0 and L = (u-1)^2 is literally the separable
    // quadratic dt*|u - 1|^2 in the controls, with no constraints.
    Focp p(FractionalOrder(0.5), 1.0, 0.0, 0.0, 1.0, 0.0, {}, parse_expr("(u-1)^2"),
           parse_expr("0"));
    const AugmentedSystem aug = build_augmented(p, 2);
    const DiscreteNlp nlp = transcribe(aug, standard_grid(p, 4), TranscriptionMode::shooting);

    const SolveOptions opts;
    const SolveReport r = solve(nlp, opts);
    check_report_invariants(r, opts);
    CHECK(r.converged);
    CHECK(r.outer_iterations == 1);  // no constraints: one pure inner pass
    CHECK(r.inner_iterations <= 3);
    CHECK(r.max_constraint_violation == 0.0);
    CHECK(r.first_order_residual <= opts.inner_tol);
    CHECK(r.multipliers.empty());
    for (double u : r.trajectory.u) CHECK(u == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.objective == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("an equality-constrained QP recovers the KKT point and its multiplier") {
    // Shooting on f = u, M = 1, n = 2, dt = 1/2 with fixed endpoint 0.5:
    //   minimize (u0^2 + u1^2)/2   subject to  (u0 + u1)/2 = 1/2,
    // whose solution is u = (1/2, 1/2) with constraint multiplier -1.
    Focp p(FractionalOrder(0.5), 1.0, 0.0, 0.0, 1.0, 0.0, 0.5, parse_expr("u^2"),
           parse_expr("u"));
    const AugmentedSystem aug = build_augmented(p, 2);
    const DiscreteNlp nlp = transcribe(aug, standard_grid(p, 2), TranscriptionMode::shooting);

    const SolveOptions opts;
    const SolveReport r = solve(nlp, opts);
    check_report_invariants(r, opts);
    CHECK(r.converged);
    REQUIRE(r.trajectory.u.size() == 2);
    CHECK(r.trajectory.u[0] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(r.trajectory.u[1] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(r.objective == doctest::Approx(0.25).epsilon(1e-7));
    REQUIRE(r.multipliers.size() == 1);
    CHECK(r.multipliers[0] == doctest::Approx(-1.0).epsilon(1e-5));
}

TEST_CASE("control bounds clip the unconstrained minimizer to the box") {
    // Unconstrained minimizer u = 3 everywhere; the box [-1, 1] is active.
    Focp p(FractionalOrder(0.5), 1.0, 0.0, 0.0, 1.0, 0.0, {}, parse_expr("(u-3)^2"),
           parse_expr("u"));
    const AugmentedSystem aug = build_augmented(p, 2);

    SolveOptions opts;
    opts.u_bounds = std::make_pair(-1.0, 1.0);

    // Shooting: bounds apply to the whole (control-only) vector.
    {
        const DiscreteNlp nlp =
            transcribe(aug, standard_grid(p, 6), TranscriptionMode::shooting);
        const SolveReport r = solve(nlp, opts);
        check_report_invariants(r, opts);
        CHECK(r.converged);
        for (double u : r.trajectory.u) CHECK(u == doctest::Approx(1.0).epsilon(1e-7));
    }
    // Full mode: bounds apply to the control block only; the states remain
    // free to satisfy the dynamics defects with the clipped control.
    {
        const DiscreteNlp nlp = transcribe(aug, standard_grid(p, 6), TranscriptionMode::full);
        const SolveReport r = solve(nlp, opts);
        check_report_invariants(r, opts);
        CHECK(r.converged);
        for (double u : r.trajectory.u) CHECK(u == doctest::Approx(1.0).epsilon(1e-6));
        // x follows u = 1: forward Euler on xdot = 1 gives x_i = t_i.
        for (std::size_t i = 0; i < r.trajectory.x.size(); ++i)
            CHECK(r.trajectory.x[i] ==
                  doctest::Approx(r.trajectory.grid.node(static_cast<int>(i))).epsilon(1e-6));
    }
}

TEST_CASE("both transcription modes agree on a smooth convex tracking problem") {
    // Nonzero start so the optimum is a genuinely nontrivial control.
    Focp p(FractionalOrder(0.5), 1.0, 0.0, 0.0, 1.0, 1.0, {},
           parse_expr("u^2 + x^2"), parse_expr("u"));
    const AugmentedSystem aug = build_augmented(p, 2);
    const Grid g = standard_grid(p, 20);

    const SolveOptions opts;
    const SolveReport rs = solve(transcribe(aug, g, TranscriptionMode::shooting), opts);
    const SolveReport rf = solve(transcribe(aug, g, TranscriptionMode::full), opts);
    check_report_invariants(rs, opts);
    check_report_invariants(rf, opts);
    CHECK(rs.converged);
    CHECK(rf.converged);
    CHECK(rs.objective == doctest::Approx(rf.objective).epsilon(1e-6));
    for (int i = 0; i < g.n; ++i)
        CHECK(rs.trajectory.u[i] == doctest::Approx(rf.trajectory.u[i]).epsilon(1e-4));
}

TEST_CASE("the fractional tracking benchmark is solved to its known optimal pair") {
    const AugmentedSystem aug = build_augmented(benchmark(), 3);
    const Grid g = standard_grid(aug.problem(), 100);
    const DiscreteNlp nlp = transcribe(aug, g, TranscriptionMode::shooting);

    const SolveOptions opts;
    const SolveReport r = solve(nlp, opts);
    check_report_invariants(r, opts);
    CHECK(r.converged);
    CHECK(r.objective <= 1e-3);
    double sup_x = 0.0, sup_u = 0.0;
    for (int i = 0; i <= g.n; ++i) {
        const double t = g.node(i);
        sup_x = std::max(sup_x, std::fabs(r.trajectory.x[i] - t * t));
    }
    for (int i = 0; i < g.n; ++i) {
        const double t = g.node(i);
        if (t >= 0.05) sup_u = std::max(sup_u, std::fabs(r.trajectory.u[i] - 2.0 * t));
    }
    CHECK(sup_x <= 0.1);
    CHECK(sup_u <= 0.2);
}

TEST_CASE("identical inputs produce bit-identical reports") {
    const AugmentedSystem aug = build_augmented(benchmark(), 3);
    const Grid g = standard_grid(aug.problem(), 40);
    const DiscreteNlp nlp = transcribe(aug, g, TranscriptionMode::shooting);

    const SolveOptions opts;
    const SolveReport a = solve(nlp, opts);
    const SolveReport b = solve(nlp, opts);
    CHECK(a.objective == b.objective);
    CHECK(a.max_constraint_violation == b.max_constraint_violation);
    CHECK(a.first_order_residual == b.first_order_residual);
    CHECK(a.inner_iterations == b.inner_iterations);
    CHECK(a.outer_iterations == b.outer_iterations);
    CHECK(a.trajectory.x == b.trajectory.x);
    CHECK(a.trajectory.u == b.trajectory.u);
    CHECK(a.multipliers == b.multipliers);
}

TEST_CASE("running out of outer iterations reports non-convergence without throwing") {
    const AugmentedSystem aug = build_augmented(benchmark(), 3);
    const Grid g = standard_grid(aug.problem(), 50);
    const DiscreteNlp nlp = transcribe(aug, g, TranscriptionMode::full);

    SolveOptions opts;
    opts.max_outer = 2;
    opts.max_inner = 30;
    const SolveReport r = solve(nlp, opts);
    CHECK_FALSE(r.converged);
    CHECK(r.outer_iterations == 2);
    CHECK(r.trajectory.x.size() == static_cast<std::size_t>(g.n) + 1);
    CHECK(r.multipliers.size() == nlp.num_constraints());
}

TEST_CASE("a non-finite objective at the initial point is rejected up front") {
    Focp p(FractionalOrder(0.5), 1.0, 0.0, 0.0, 1.0, 0.0, {}, parse_expr("ln(x)"),
           parse_expr("u"));
    const AugmentedSystem aug = build_augmented(p, 2);
    const DiscreteNlp nlp = transcribe(aug, standard_grid(p, 4), TranscriptionMode::shooting);
    CHECK_THROWS_AS(solve(nlp, SolveOptions{}), std::runtime_error);
}

TEST_CASE("solver options are validated before any work is done") {
    const AugmentedSystem aug = build_augmented(benchmark(), 2);
    const DiscreteNlp nlp =
        transcribe(aug, standard_grid(aug.problem(), 4), TranscriptionMode::shooting);

    SolveOptions opts;
    opts.outer_tol = 0.0;
    CHECK_THROWS_AS(solve(nlp, opts), std::invalid_argument);
    opts = SolveOptions{};
    opts.inner_tol = -1.0;
    CHECK_THROWS_AS(solve(nlp, opts), std::invalid_argument);
    opts = SolveOptions{};
    opts.max_outer = 0;
    CHECK_THROWS_AS(solve(nlp, opts), std::invalid_argument);
    opts = SolveOptions{};
    opts.max_inner = 0;
    CHECK_THROWS_AS(solve(nlp, opts), std::invalid_argument);
    opts = SolveOptions{};
    opts.penalty_init = 0.0;
    CHECK_THROWS_AS(solve(nlp, opts), std::invalid_argument);
    opts = SolveOptions{};
    opts.penalty_growth = 1.0;
    CHECK_THROWS_AS(solve(nlp, opts), std::invalid_argument);
    opts = SolveOptions{};
    opts.u_bounds = std::make_pair(2.0, -2.0);
    CHECK_THROWS_AS(solve(nlp, opts), std::invalid_argument);
}
