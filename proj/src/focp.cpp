#include "focsolve/focp.hpp"

#include <cassert>
#include <cmath>
#include <sstream>
#include <utility>

namespace focsolve {

Focp::Focp(FractionalOrder alpha_, double M_, double N_, double a_, double b_, double x_a_,
           std::optional<double> x_b_, Expr L_, Expr f_)
    : alpha(alpha_), M(M_), N(N_), a(a_), b(b_), x_a(x_a_), x_b(x_b_), L(std::move(L_)), f(std::move(f_)) {
    if (!std::isfinite(M) || !std::isfinite(N) || !std::isfinite(a) || !std::isfinite(b) || !std::isfinite(x_a))
        throw std::invalid_argument("Focp: problem data must be finite");
    if (x_b && !std::isfinite(*x_b)) throw std::invalid_argument("Focp: x_b must be finite");
    if (M == 0.0 && N == 0.0) throw std::invalid_argument("Focp: M and N must not both be zero");
    if (!(b > a)) throw std::invalid_argument("Focp: interval must satisfy b > a");
    if (!L || !f) throw std::invalid_argument("Focp: L and f expressions must be non-null");
}

AugmentedSystem::AugmentedSystem(Focp problem, MomentScheme scheme)
    : problem_(std::move(problem)),
      scheme_(std::move(scheme)),
      Lx_(diff_expr(problem_.L, 'x')),
      Lu_(diff_expr(problem_.L, 'u')),
      fx_(diff_expr(problem_.f, 'x')),
      fu_(diff_expr(problem_.f, 'u')) {}

double AugmentedSystem::denom(double t) const {
    const double s = t - problem_.a;
    if (s <= 0.0) return problem_.M;
    return problem_.M + problem_.N * scheme_.B * std::pow(s, 1.0 - scheme_.alpha.alpha);
}

double AugmentedSystem::F(double t, double x, std::span<const double> V, double u) const {
    assert(static_cast<int>(V.size()) == scheme_.K - 1);
    const double s = t - problem_.a;
    if (s <= 0.0) {
        if (problem_.M == 0.0)
            throw std::domain_error(
                "dynamics right-hand side is undefined at t = a when M = 0; use the grid-offset option");
        return f(t, x, u) / problem_.M;
    }
    const double al = scheme_.alpha.alpha;
    double num = f(t, x, u) - problem_.N * scheme_.A * std::pow(s, -al) * x +
                 problem_.N * problem_.x_a * std::pow(s, -al) / gamma_fn(1.0 - al);
    for (int p = 2; p <= scheme_.K; ++p)
        num += problem_.N * scheme_.C[p - 2] * std::pow(s, 1.0 - p - al) * V[p - 2];
    return num / denom(t);
}

double AugmentedSystem::dF_dx(double t, double x, double u) const {
    const double s = t - problem_.a;
    if (s <= 0.0) return f_x(t, x, u) / problem_.M;
    const double al = scheme_.alpha.alpha;
    return (f_x(t, x, u) - problem_.N * scheme_.A * std::pow(s, -al)) / denom(t);
}

double AugmentedSystem::dF_du(double t, double x, double u) const {
    const double s = t - problem_.a;
    if (s <= 0.0) return f_u(t, x, u) / problem_.M;
    return f_u(t, x, u) / denom(t);
}

double AugmentedSystem::dF_dV(double t, int p) const {
    assert(p >= 2 && p <= scheme_.K);
    const double s = t - problem_.a;
    if (s <= 0.0) return 0.0;
    const double al = scheme_.alpha.alpha;
    return problem_.N * scheme_.C[p - 2] * std::pow(s, 1.0 - p - al) / denom(t);
}

double AugmentedSystem::g(double t, int p) const {
    assert(p >= 2 && p <= scheme_.K);
    const double s = t - problem_.a;
    if (s <= 0.0) return p == 2 ? -1.0 : 0.0;  // 0^0 := 1 at p = 2
    return (1.0 - p) * std::pow(s, p - 2);
}

AugmentedSystem build_augmented(const Focp& problem, int K) {
    if (K < 2) throw std::invalid_argument("build_augmented: K must be at least 2");
    if (!problem.alpha.solver_range())
        throw std::invalid_argument("build_augmented: alpha must lie in (0, 1)");
    AugmentedSystem aug(problem, coefficients(problem.alpha, K));

    // Reject problems whose denominator vanishes inside (a, b]: scan a fixed
    // grid for zeros or sign changes, then bisect to locate the root.
    const int scan_points = 2048;
    const double a = problem.a;
    const double h = (problem.b - a) / scan_points;
    double prev_t = a;
    double prev_v = problem.M;  // denom -> M as t -> a+
    bool have_prev = problem.M != 0.0;
    for (int j = 1; j <= scan_points; ++j) {
        const double t = a + j * h;
        const double v = aug.denom(t);
        double root = 0.0;
        bool found = false;
        if (v == 0.0) {
            root = t;
            found = true;
        } else if (have_prev && std::signbit(v) != std::signbit(prev_v)) {
            double lo = prev_t, hi = t;
            for (int it = 0; it < 100 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double vm = aug.denom(mid);
                if (vm == 0.0) {
                    lo = hi = mid;
                } else if (std::signbit(vm) == std::signbit(prev_v)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            root = 0.5 * (lo + hi);
            found = true;
        }
        if (found) {
            std::ostringstream msg;
            msg << "degenerate dynamics denominator: M + N*B*(t-a)^(1-alpha) vanishes at t = " << root;
            throw std::domain_error(msg.str());
        }
        prev_t = t;
        prev_v = v;
        have_prev = true;
    }
    return aug;
}

}  // namespace focsolve
