#pragma once
// Moment expansion of the fractional derivative: the coefficients A, B, C,
// the auxiliary moment states V_p, the truncated expansion itself, and its
// truncation error bound.
//
// The expansion replaces the (history-dependent) fractional derivative of x
// by an expression local in x, xdot and K-1 auxiliary states:
//
//   D^alpha x(t) ~ A (t-a)^(-alpha) x(t) + B (t-a)^(1-alpha) xdot(t)
//                  - sum_{p=2}^{K} C_p (t-a)^(1-p-alpha) V_p(t),
//   Vdot_p = (1-p) (t-a)^(p-2) x(t),   V_p(a) = 0.
//
// A and B depend on the truncation level K; they act as counterweights for
// the dropped tail, so they must never be treated as K-independent constants.

#include <vector>

#include "focsolve/fracops.hpp"

namespace focsolve {

struct MomentScheme {
    FractionalOrder alpha;
    int K;                  // truncation level, >= 2
    double A;
    double B;
    std::vector<double> C;  // C[p-2] holds C(alpha, p) for p = 2..K
};

struct MomentStates {
    std::vector<double> grid;
    // V[p-2][i] holds V_p(grid[i]) for p = 2..K.
    std::vector<std::vector<double>> V;
};

// Closed-form coefficients:
//   A = [1 + sum_{p=2}^{K} G(p-1+a)/(G(a) (p-1)!)] / G(1-a)
//   B = [1 + sum_{p=1}^{K} G(p-1+a)/(G(a-1) p!)]   / G(2-a)
//   C_p = G(p-1+a) / [G(2-a) G(a-1) (p-1)!]
// computed with log-gamma accumulation. Requires K >= 2 and 0 < alpha < 1.
MomentScheme coefficients(FractionalOrder alpha, int K);

// Integrates Vdot_p = (1-p)(t-a)^(p-2) x(t) from V_p(a) = 0 by the product
// trapezoidal rule on x's grid (which must start at a): each panel integrates
// the power weight exactly against the linear interpolant of x. Second-order
// on smooth x, exact on affine x, and stable under the singular expansion
// weights near t = a.
MomentStates moment_states(const SampledFunction& x, double a, int K);

// Truncated expansion of the Riemann-Liouville derivative at node j.
// Returns 0 at j = 0 (t = a) by the limit convention.
double approx_rl(const SampledFunction& x, const SampledFunction& xdot,
                 const MomentStates& V, const MomentScheme& scheme, std::size_t j);

// Caputo variant: approx_rl minus x_a (t-a)^(-alpha) / Gamma(1-alpha).
// Returns 0 at j = 0 by the same convention.
double approx_caputo(const SampledFunction& x, const SampledFunction& xdot,
                     const MomentStates& V, const MomentScheme& scheme,
                     double x_a, std::size_t j);

// Truncation error bound:
//   M2 exp((1-a)^2 + (1-a)) / (Gamma(2-a) (1-a) K^(1-a)) * (t-a)^(2-a),
// where M2 bounds |xddot| on [a,t].
double error_bound(FractionalOrder alpha, int K, double a, double t, double M2);

}  // namespace focsolve
