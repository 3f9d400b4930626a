#pragma once

#include <optional>
#include <span>

#include "focsolve/expr.hpp"
#include "focsolve/fracops.hpp"
#include "focsolve/momentexp.hpp"

namespace focsolve {

// A fractional optimal control problem:
//
//   minimize   J(x,u) = integral_a^b L(t, x(t), u(t)) dt
//   subject to M xdot(t) + N cD^alpha x(t) = f(t, x(t), u(t)),  x(a) = x_a,
//
// with x(b) either fixed (x_b set) or free.  Scalar state and control.
struct Focp {
    FractionalOrder alpha;
    double M;
    double N;
    double a;
    double b;
    double x_a;
    std::optional<double> x_b;
    Expr L;
    Expr f;

    // Validates (M, N) != (0, 0), b > a, finite data, non-null expressions.
    Focp(FractionalOrder alpha_, double M_, double N_, double a_, double b_, double x_a_,
         std::optional<double> x_b_, Expr L_, Expr f_);
};

// The fractional dynamics with the Caputo operator replaced by its moment
// expansion, rearranged into an integer-order system of K states
// (x, V_2, ..., V_K):
//
//   xdot   = F(t, x, Vbar, u)
//   Vdot_p = (1-p) (t-a)^(p-2) x,   V_p(a) = 0
//
// where, with s = t - a,
//
//   F = [ f(t,x,u) - N A s^(-alpha) x + sum_p N C_p s^(1-p-alpha) V_p
//         + N x_a s^(-alpha) / Gamma(1-alpha) ] / [ M + N B s^(1-alpha) ].
//
// At t = a the three negative-power groups are taken jointly as 0, so
// F(a, x, 0, u) = f(a, x, u) / M; this requires M != 0 to evaluate at t = a.
//
// Immutable after construction; all evaluation is pure.
class AugmentedSystem {
  public:
    AugmentedSystem(Focp problem, MomentScheme scheme);

    const Focp& problem() const { return problem_; }
    const MomentScheme& scheme() const { return scheme_; }
    int K() const { return scheme_.K; }

    // Denominator M + N B (t-a)^(1-alpha); equals M at t = a.
    double denom(double t) const;

    // Right-hand side of xdot; V holds (V_2, ..., V_K), size K-1.
    double F(double t, double x, std::span<const double> V, double u) const;

    // Partials of F; dF_dV is independent of (x, Vbar, u).
    double dF_dx(double t, double x, double u) const;
    double dF_du(double t, double x, double u) const;
    double dF_dV(double t, int p) const;

    // Moment rate factor: Vdot_p = g(t, p) * x with g = (1-p)(t-a)^(p-2),
    // using the 0^0 := 1 convention at t = a, p = 2.
    double g(double t, int p) const;

    // Running cost and dynamics right-hand side with cached symbolic partials.
    double L(double t, double x, double u) const { return eval_expr(problem_.L, t, x, u); }
    double L_x(double t, double x, double u) const { return eval_expr(Lx_, t, x, u); }
    double L_u(double t, double x, double u) const { return eval_expr(Lu_, t, x, u); }
    double f(double t, double x, double u) const { return eval_expr(problem_.f, t, x, u); }
    double f_x(double t, double x, double u) const { return eval_expr(fx_, t, x, u); }
    double f_u(double t, double x, double u) const { return eval_expr(fu_, t, x, u); }

  private:
    Focp problem_;
    MomentScheme scheme_;
    Expr Lx_, Lu_, fx_, fu_;
};

// Builds the augmented system for the given expansion depth K >= 2 after
// verifying the denominator does not vanish on (a, b] (sign-change scan on an
// internal grid, refined by bisection; the error message reports the t where
// it vanishes).
AugmentedSystem build_augmented(const Focp& problem, int K);

}  // namespace focsolve
