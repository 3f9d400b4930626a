#pragma once
// Special functions and reference fractional-derivative operators.
//
// Everything here is a pure function. The operators serve two roles: they are
// the analytic building blocks of the solver (gamma, the power rule) and they
// are methodologically independent oracles (the L1 quadrature, the binomial
// series) used to cross-check the moment expansion implemented elsewhere.

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace focsolve {

// Order of a fractional derivative. General positive orders are accepted so
// the reference operators can be exercised beyond the solver's range; code
// paths that require 0 < alpha < 1 validate that themselves.
struct FractionalOrder {
    double alpha;

    explicit FractionalOrder(double a);

    // True when the order lies in the open interval (0,1) used by the solver.
    bool solver_range() const { return alpha > 0.0 && alpha < 1.0; }
};

// A function sampled on a strictly increasing grid; grid.front() is the left
// endpoint `a` of the underlying interval.
struct SampledFunction {
    std::vector<double> grid;
    std::vector<double> values;

    SampledFunction(std::vector<double> g, std::vector<double> v);

    std::size_t size() const { return grid.size(); }
};

// Gamma function, accurate to at least 12 significant digits on [-20, 50]
// away from poles. Throws std::domain_error at zero and negative integers.
double gamma_fn(double x);

// log|Gamma(x)| and the sign of Gamma(x) (+1 or -1). Same pole behavior.
double log_abs_gamma(double x, int* sign = nullptr);

// Generalized binomial coefficient
//   binom(alpha, k) = (-1)^(k-1) * alpha * Gamma(k-alpha)
//                     / (Gamma(1-alpha) * Gamma(k+1)),
// with pole-cancelling limits applied (k = 0 gives 1; integer alpha gives the
// classical coefficients, zero for k > alpha >= 0).
double frac_binomial(double alpha, unsigned k);

// Caputo derivative of (t-a)^(beta-1):
//   Gamma(beta)/Gamma(beta-alpha) * (t-a)^(beta-alpha-1),  requires beta > n
// where n = floor(alpha)+1. At t = a the value is 0 when the exponent is
// positive, the coefficient itself when it is 0, and a domain error when the
// expression is singular.
double caputo_power(double alpha, double beta, double a, double t);

// Classical L1 quadrature of the Caputo derivative at grid node j >= 1,
// using piecewise-linear interpolation of x. Exact on affine functions.
// Throws std::out_of_range unless 1 <= j < x.size().
double caputo_l1(const SampledFunction& x, FractionalOrder alpha, std::size_t j);

// Riemann-Liouville value from a Caputo value for 0 < alpha < 1:
//   RL = C + x_a * (t-a)^(-alpha) / Gamma(1-alpha).
// Throws std::domain_error at t = a when x_a != 0 (singular correction).
double rl_from_caputo(double caputo_value, double x_a, FractionalOrder alpha,
                      double a, double t);

// Truncated power-series form of the Riemann-Liouville derivative:
//   sum_{k=0}^{k_max} binom(alpha,k) (t-a)^(k-alpha)/Gamma(k+1-alpha) x^(k)(t).
// derivs[k] holds x^(k)(t). Throws std::domain_error at t = a.
double rl_series(const std::vector<double>& derivs, FractionalOrder alpha,
                 double a, double t, unsigned k_max);

}  // namespace focsolve
