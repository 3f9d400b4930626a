#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "focsolve/transcribe.hpp"

namespace focsolve {

// Options for the augmented-Lagrangian solver.  Initialization is
// deterministic and seed-free: controls start at zero (projected onto
// u_bounds when present) and full-mode states start from the zero-control
// simulation.
struct SolveOptions {
    double outer_tol = 1e-8;       // constraint-violation target
    double inner_tol = 1e-8;       // first-order (gradient-norm) target
    int max_outer = 50;            // outer (multiplier) iterations
    int max_inner = 500;           // quasi-Newton iterations per outer pass
    double penalty_init = 10.0;    // initial quadratic-penalty weight
    double penalty_growth = 10.0;  // factor applied when violation stalls
    std::optional<std::pair<double, double>> u_bounds;  // box bounds on controls
};

struct SolveReport {
    // Placeholder grid until solve() assigns the real trajectory; keeps the
    // report default-constructible for staged assembly.
    Trajectory trajectory{Grid(0.0, 1.0, 2), {}, {}, {}};
    double objective = 0.0;            // discrete objective at the final point
    double max_constraint_violation = 0.0;  // inf-norm of the constraint vector
    int inner_iterations = 0;          // cumulative quasi-Newton iterations
    int outer_iterations = 0;
    bool converged = false;            // implies violation <= outer_tol and
                                       // first_order_residual <= 10*inner_tol
    double first_order_residual = 0.0;  // inf-norm of grad f + J^T multipliers
                                        // (projected when bounds are active)
    std::vector<double> multipliers;   // final multiplier per constraint row
    TranscriptionMode mode = TranscriptionMode::shooting;
};

// Minimizes the transcribed problem with an augmented-Lagrangian outer loop
// (multiplier update lambda += rho * c each accepted outer pass, penalty
// growth when violation stalls) around a preconditioned limited-memory
// quasi-Newton inner minimizer with backtracking Armijo line search
// (parameter 1e-4, halving).  Box bounds on the controls are enforced by
// projection inside the line search.
//
// Non-convergence is reported (converged = false), never thrown; a non-finite
// objective at the initial point throws.
SolveReport solve(const DiscreteNlp& nlp, const SolveOptions& opts = {});

}  // namespace focsolve
