#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "focsolve/diagnostics.hpp"
#include "focsolve/focp.hpp"
#include "focsolve/optim.hpp"
#include "focsolve/transcribe.hpp"

using focsolve::AugmentedSystem;
using focsolve::build_augmented;
using focsolve::DiscreteNlp;
using focsolve::Focp;
using focsolve::FractionalOrder;
using focsolve::Grid;
using focsolve::hamiltonian;
using focsolve::parse_expr;
using focsolve::PontryaginReport;
using focsolve::pontryagin_check;
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

}  // namespace

TEST_CASE("the Hamiltonian composes running cost, dynamics, and moment rates") {
    const AugmentedSystem aug = build_augmented(benchmark(), 3);
    const double t = 0.42, x = 0.19, u = 0.88;
    const std::vector<double> V = {-0.04, 0.011};
    const std::vector<double> lam = {1.3, -0.2, 0.7};

    const double expected = aug.L(t, x, u) + lam[0] * aug.F(t, x, V, u) +
                            lam[1] * aug.g(t, 2) * x + lam[2] * aug.g(t, 3) * x;
    CHECK(hamiltonian(aug, t, x, V, lam, u) == doctest::Approx(expected).epsilon(1e-12));

    // Affine in the costates: H(lam) - H(0) is the costate-weighted sum.
    const std::vector<double> zero = {0.0, 0.0, 0.0};
    CHECK(hamiltonian(aug, t, x, V, zero, u) == doctest::Approx(aug.L(t, x, u)).epsilon(1e-13));
    const double delta =
        hamiltonian(aug, t, x, V, lam, u) - hamiltonian(aug, t, x, V, zero, u);
    CHECK(delta == doctest::Approx(lam[0] * aug.F(t, x, V, u) + lam[1] * aug.g(t, 2) * x +
                                   lam[2] * aug.g(t, 3) * x)
                       .epsilon(1e-12));
}

TEST_CASE("with a unit dynamics costate and no fractional term the Hamiltonian is f") {
    Focp p(FractionalOrder(0.5), 1.0, 0.0, 0.0, 1.0, 0.0, {}, parse_expr("0"),
           parse_expr("u"));
    const AugmentedSystem aug = build_augmented(p, 2);
    const std::vector<double> V = {0.37};  // must be irrelevant when N = 0
    const std::vector<double> lam = {1.0, 0.0};
    for (double u : {-1.5, 0.0, 2.25})
        CHECK(hamiltonian(aug, 0.6, 0.8, V, lam, u) == doctest::Approx(u).epsilon(1e-14));
}

TEST_CASE("without fractional coupling the Hamiltonian does not depend on the moment states") {
    Focp p(FractionalOrder(0.5), 2.0, 0.0, 0.0, 1.0, 0.0, {}, parse_expr("u^2 + x^2"),
           parse_expr("u + x"));
    const AugmentedSystem aug = build_augmented(p, 3);
    const std::vector<double> lam = {0.9, 0.0, 0.0};
    const std::vector<double> Va = {0.0, 0.0};
    const std::vector<double> Vb = {5.0, -3.0};
    CHECK(hamiltonian(aug, 0.5, 0.3, Va, lam, 0.7) ==
          hamiltonian(aug, 0.5, 0.3, Vb, lam, 0.7));
}

TEST_CASE("the Hamiltonian validates the sizes of its state and costate blocks") {
    const AugmentedSystem aug = build_augmented(benchmark(), 3);
    const std::vector<double> V_short = {0.1};
    const std::vector<double> V_ok = {0.1, 0.2};
    const std::vector<double> lam_short = {1.0, 2.0};
    const std::vector<double> lam_ok = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(hamiltonian(aug, 0.5, 0.1, V_short, lam_ok, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(hamiltonian(aug, 0.5, 0.1, V_ok, lam_short, 0.3), std::invalid_argument);
}

TEST_CASE("costate recovery wires multiplier rows to nodes as documented") {
    // Two steps, K = 2: small enough to expand every recovered quantity by
    // hand from the row layout (x defects, then V_2 defects, then terminal).
    const AugmentedSystem aug = build_augmented(benchmark(), 2);
    const Grid g = standard_grid(aug.problem(), 2);

    SolveReport r;
    r.mode = TranscriptionMode::full;
    r.trajectory = Trajectory{g, {0.0, 0.2, 0.9}, {0.1, 0.7}, {{0.0, -0.1, -0.25}}};
    const std::vector<double> mu = {0.3, -0.4, 0.05, 0.2, 9.9};  // last row: terminal, unused

    const PontryaginReport pr = pontryagin_check(aug, g, r, mu);
    CHECK_FALSE(pr.endpoint_free);
    CHECK(!pr.convention_note.empty());

    // lambda_p(t_node) = -mu[(p-1)*n + node-1].
    const double l1_1 = -0.3, l1_2 = 0.4, l2_1 = -0.05, l2_2 = -0.2;
    REQUIRE(pr.transversality.size() == 2);
    CHECK(pr.transversality[0] == doctest::Approx(l1_2).epsilon(1e-14));
    CHECK(pr.transversality[1] == doctest::Approx(l2_2).epsilon(1e-14));

    // Only interior node i = 1 contributes; compose the residuals directly.
    const double t = 0.5, x = 0.2, u = 0.7, dt = 0.5;
    const double stat = std::fabs(aug.L_u(t, x, u) + l1_1 * aug.dF_du(t, x, u));
    CHECK(pr.stationarity_residual == doctest::Approx(stat).epsilon(1e-12));

    const double dx = aug.L_x(t, x, u) + l1_2 * aug.dF_dx(t, x, u) + l2_2 * aug.g(t, 2);
    const double def_x = std::fabs((l1_2 - l1_1) / dt + dx);
    const double def_v = std::fabs((l2_2 - l2_1) / dt + l1_2 * aug.dF_dV(t, 2));
    CHECK(pr.costate_defect == doctest::Approx(std::max(def_x, def_v)).epsilon(1e-12));
}

TEST_CASE("costate recovery rejects shooting reports and short multiplier vectors") {
    const AugmentedSystem aug = build_augmented(benchmark(), 2);
    const Grid g = standard_grid(aug.problem(), 2);

    SolveReport shooting_report;
    shooting_report.mode = TranscriptionMode::shooting;
    shooting_report.trajectory = Trajectory{g, {0.0, 0.1, 0.3}, {0.0, 0.0}, {{0.0, 0.0, 0.0}}};
    const std::vector<double> mu(5, 0.0);
    CHECK_THROWS_AS(pontryagin_check(aug, g, shooting_report, mu), std::logic_error);

    SolveReport full_report;
    full_report.mode = TranscriptionMode::full;
    full_report.trajectory = shooting_report.trajectory;
    const std::vector<double> too_short(3, 0.0);
    CHECK_THROWS_AS(pontryagin_check(aug, g, full_report, too_short), std::invalid_argument);

    SolveReport bad_traj = full_report;
    bad_traj.trajectory.x.pop_back();
    CHECK_THROWS_AS(pontryagin_check(aug, g, bad_traj, mu), std::invalid_argument);
}

TEST_CASE("a costless problem certifies itself with identically zero residuals") {
    // L = 0, free endpoint: the zero-control trajectory is optimal and every
    // multiplier is exactly zero, so all certificate residuals vanish.
    Focp p(FractionalOrder(0.5), 1.0, 1.0, 0.0, 1.0, 0.0, {}, parse_expr("0"),
           parse_expr("u"));
    const AugmentedSystem aug = build_augmented(p, 3);
    const Grid g = standard_grid(p, 10);
    const DiscreteNlp nlp = transcribe(aug, g, TranscriptionMode::full);
    const SolveReport r = solve(nlp, SolveOptions{});
    REQUIRE(r.converged);
    REQUIRE(r.multipliers.size() == nlp.num_constraints());

    const PontryaginReport pr = pontryagin_check(aug, g, r, r.multipliers);
    CHECK(pr.endpoint_free);
    CHECK(pr.stationarity_residual <= 1e-12);
    CHECK(pr.costate_defect <= 1e-12);
    for (double lam_b : pr.transversality) CHECK(std::fabs(lam_b) <= 1e-12);
}

TEST_CASE("on a solved convex problem the certificate behaves like a discretization") {
    // Classical linear-quadratic problem with a nonzero start (so the costate
    // is not identically zero): the costate defect is bounded by the solver
    // residual over dt, while the same-node stationarity pairing carries an
    // O(dt) bias that must shrink as the grid refines.
    Focp p(FractionalOrder(0.5), 1.0, 0.0, 0.0, 1.0, 1.0, {},
           parse_expr("u^2 + x^2"), parse_expr("u"));
    const AugmentedSystem aug = build_augmented(p, 2);

    double stat_coarse = 0.0;
    double stat_fine = 0.0;
    for (int n : {20, 40}) {
        const Grid g = standard_grid(p, n);
        const DiscreteNlp nlp = transcribe(aug, g, TranscriptionMode::full);
        const SolveReport r = solve(nlp, SolveOptions{});
        REQUIRE(r.converged);
        const PontryaginReport pr = pontryagin_check(aug, g, r, r.multipliers);
        CHECK(pr.endpoint_free);
        CHECK(pr.costate_defect <= 1e-4);
        CHECK(pr.stationarity_residual <= 0.15);
        // Free endpoint: the dynamics costate vanishes at b.
        CHECK(std::fabs(pr.transversality[0]) <= 1e-6);
        (n == 20 ? stat_coarse : stat_fine) = pr.stationarity_residual;
    }
    CHECK(stat_fine < stat_coarse);
}
