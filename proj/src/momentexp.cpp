#include "focsolve/momentexp.hpp"

#include <cmath>
#include <stdexcept>

namespace focsolve {

MomentScheme coefficients(FractionalOrder alpha, int K) {
    if (K < 2) throw std::invalid_argument("coefficients: K must be >= 2");
    if (!alpha.solver_range())
        throw std::invalid_argument("coefficients: requires 0 < alpha < 1");
    const double al = alpha.alpha;

    // All gamma arguments below are positive except alpha-1 in (-1,0), where
    // Gamma is negative; its sign is factored out explicitly and magnitudes
    // are accumulated in log space (Gamma(p-1+alpha) grows factorially).
    const double lg_alpha = log_abs_gamma(al);
    const double lg_alpha_m1 = log_abs_gamma(al - 1.0);  // Gamma(alpha-1) < 0
    const double g1ma = gamma_fn(1.0 - al);
    const double g2ma = gamma_fn(2.0 - al);

    double sum_a = 0.0;  // sum_{p=2}^{K} G(p-1+al)/(G(al) (p-1)!)
    for (int p = 2; p <= K; ++p)
        sum_a += std::exp(log_abs_gamma(p - 1.0 + al) - lg_alpha - log_abs_gamma(static_cast<double>(p)));

    double sum_b = 0.0;  // |sum_{p=1}^{K} G(p-1+al)/(G(al-1) p!)|
    for (int p = 1; p <= K; ++p)
        sum_b += std::exp(log_abs_gamma(p - 1.0 + al) - lg_alpha_m1 - log_abs_gamma(p + 1.0));

    MomentScheme s{alpha, K, 0.0, 0.0, {}};
    s.A = (1.0 + sum_a) / g1ma;
    s.B = (1.0 - sum_b) / g2ma;  // Gamma(alpha-1) < 0 flips every term's sign
    s.C.reserve(static_cast<std::size_t>(K) - 1);
    for (int p = 2; p <= K; ++p) {
        double mag = std::exp(log_abs_gamma(p - 1.0 + al) - lg_alpha_m1 -
                              log_abs_gamma(static_cast<double>(p)));
        s.C.push_back(-mag / g2ma);  // negative: the Gamma(alpha-1) sign again
    }
    return s;
}

MomentStates moment_states(const SampledFunction& x, double a, int K) {
    if (K < 2) throw std::invalid_argument("moment_states: K must be >= 2");
    if (x.grid.front() != a)
        throw std::invalid_argument("moment_states: grid must start at a");
    const std::size_t m = x.size();
    MomentStates out;
    out.grid = x.grid;
    out.V.assign(static_cast<std::size_t>(K) - 1, std::vector<double>(m, 0.0));
    // Product trapezoidal rule: on each panel the power weight (tau-a)^(p-2)
    // is integrated exactly against the linear interpolant of x.  A plain
    // trapezoidal rule on the full integrand would leave an O(h^p) first-panel
    // error that the singular weights (t-a)^(1-p-alpha) of the expansion blow
    // up to O(h^(1-alpha)) at the first node whenever x'(a) != 0.
    for (int p = 2; p <= K; ++p) {
        auto& vp = out.V[static_cast<std::size_t>(p) - 2];
        const double q = p - 1.0;
        for (std::size_t i = 1; i < m; ++i) {
            const double s0 = x.grid[i - 1] - a;
            const double s1 = x.grid[i] - a;
            const double slope = (x.values[i] - x.values[i - 1]) / (s1 - s0);
            const double x_at_a = x.values[i - 1] - s0 * slope;
            // int_{s0}^{s1} s^(p-2) (x_at_a + slope s) ds, exact antiderivative
            const double panel =
                x_at_a * (std::pow(s1, q) - std::pow(s0, q)) / q +
                slope * (std::pow(s1, q + 1.0) - std::pow(s0, q + 1.0)) / (q + 1.0);
            vp[i] = vp[i - 1] + (1.0 - p) * panel;
        }
    }
    return out;
}

double approx_rl(const SampledFunction& x, const SampledFunction& xdot,
                 const MomentStates& V, const MomentScheme& scheme, std::size_t j) {
    if (j >= x.size()) throw std::out_of_range("approx_rl: node index out of range");
    if (x.size() != xdot.size() || x.size() != V.grid.size())
        throw std::invalid_argument("approx_rl: inconsistent grids");
    if (j == 0) return 0.0;  // limit convention at t = a
    const double al = scheme.alpha.alpha;
    const double s = x.grid[j] - x.grid[0];
    double acc = scheme.A * std::pow(s, -al) * x.values[j] +
                 scheme.B * std::pow(s, 1.0 - al) * xdot.values[j];
    for (int p = 2; p <= scheme.K; ++p)
        acc -= scheme.C[static_cast<std::size_t>(p) - 2] * std::pow(s, 1.0 - p - al) *
               V.V[static_cast<std::size_t>(p) - 2][j];
    return acc;
}

double approx_caputo(const SampledFunction& x, const SampledFunction& xdot,
                     const MomentStates& V, const MomentScheme& scheme,
                     double x_a, std::size_t j) {
    if (j == 0) return 0.0;
    const double al = scheme.alpha.alpha;
    const double s = x.grid[j] - x.grid[0];
    return approx_rl(x, xdot, V, scheme, j) -
           x_a * std::pow(s, -al) / gamma_fn(1.0 - al);
}

double error_bound(FractionalOrder alpha, int K, double a, double t, double M2) {
    if (K < 2) throw std::invalid_argument("error_bound: K must be >= 2");
    if (!alpha.solver_range())
        throw std::invalid_argument("error_bound: requires 0 < alpha < 1");
    if (M2 < 0.0) throw std::invalid_argument("error_bound: M2 must be nonnegative");
    if (t < a) throw std::invalid_argument("error_bound: t < a");
    const double om = 1.0 - alpha.alpha;
    return M2 * std::exp(om * om + om) /
           (gamma_fn(1.0 + om) * om * std::pow(static_cast<double>(K), om)) *
           std::pow(t - a, 1.0 + om);
}

}  // namespace focsolve
