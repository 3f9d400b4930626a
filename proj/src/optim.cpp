#include "focsolve/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "focsolve/kernels.hpp"

namespace focsolve {

namespace {

constexpr double kArmijo = 1e-4;          // sufficient-decrease parameter
constexpr int kMaxHalvings = 60;          // line-search budget
constexpr int kMemory = 10;               // quasi-Newton pair memory
constexpr double kPenaltyCap = 1e12;
constexpr double kStallRatio = 0.25;      // violation contraction below this is a stall

// Box bounds restricted to the control coordinates [begin, end).
struct Bounds {
    bool active = false;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    std::size_t begin = 0;
    std::size_t end = 0;
};

void project(std::vector<double>& z, const Bounds& b) {
    if (!b.active) return;
    for (std::size_t j = b.begin; j < b.end; ++j) z[j] = std::clamp(z[j], b.lo, b.hi);
}

double projected_gradient_norm(const std::vector<double>& z, const std::vector<double>& g,
                               const Bounds& b) {
    if (!b.active) return norm_inf(g);
    double out = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
        const double step = (j >= b.begin && j < b.end)
                                ? z[j] - std::clamp(z[j] - g[j], b.lo, b.hi)
                                : g[j];
        out = std::max(out, std::fabs(step));
    }
    return out;
}

double norm2(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

// Augmented Lagrangian of the row-scaled constraints at fixed (lam, rho):
//   f(z) + lam . (s*c(z)) + rho/2 |s*c(z)|^2.
// eval() reports failure (domain error anywhere in the expression tree, or a
// non-finite value) instead of throwing, so the line search can reject the
// trial point.
class AlFunction {
  public:
    AlFunction(const DiscreteNlp& nlp, const std::vector<double>& scale) : nlp_(nlp), s_(scale) {}

    void set_multipliers(const std::vector<double>* lam, double rho) {
        lam_ = lam;
        rho_ = rho;
    }

    bool eval(const std::vector<double>& z, double& f, std::vector<double>& g) const {
        try {
            f = nlp_.objective(z);
            g = nlp_.objective_gradient(z);
            if (nlp_.num_constraints() > 0) {
                std::vector<double> c = nlp_.constraints(z);
                std::vector<double> y(c.size());
                for (std::size_t i = 0; i < c.size(); ++i) {
                    const double ct = s_[i] * c[i];
                    f += (*lam_)[i] * ct + 0.5 * rho_ * ct * ct;
                    y[i] = s_[i] * ((*lam_)[i] + rho_ * ct);
                }
                nlp_.add_constraint_jtprod(z, y, g);
            }
        } catch (const std::exception&) {
            return false;
        }
        if (!std::isfinite(f)) return false;
        for (const double gj : g)
            if (!std::isfinite(gj)) return false;
        return true;
    }

  private:
    const DiscreteNlp& nlp_;
    const std::vector<double>& s_;
    const std::vector<double>* lam_ = nullptr;
    double rho_ = 0.0;
};

struct PairMemory {
    std::vector<std::vector<double>> S;
    std::vector<std::vector<double>> Y;

    void clear() {
        S.clear();
        Y.clear();
    }
    void push(std::vector<double> s, std::vector<double> y) {
        S.push_back(std::move(s));
        Y.push_back(std::move(y));
        if (S.size() > kMemory) {
            S.erase(S.begin());
            Y.erase(Y.begin());
        }
    }
};

struct InnerResult {
    double pg_norm = 0.0;
    int iterations = 0;
    bool stalled = false;  // line search exhausted; cannot improve at this conditioning
};

// Limited-memory quasi-Newton descent with diagonal preconditioner inv_d,
// backtracking (halving) Armijo line search, and projection onto the control
// bounds.  The pair memory and iterate persist across calls via `z` and
// `mem`; a non-descent direction falls back to preconditioned steepest
// descent and resets the memory.
InnerResult minimize_inner(const AlFunction& fn, std::vector<double>& z, double tol, int max_iter,
                           const std::vector<double>& inv_d, PairMemory& mem, const Bounds& bounds) {
    project(z, bounds);
    double f;
    std::vector<double> g;
    if (!fn.eval(z, f, g))
        throw std::runtime_error("objective is not finite at the initial point of an inner pass");

    InnerResult result;
    const std::size_t dim = z.size();
    std::vector<double> q(dim), r(dim), z_trial, g_trial(dim);
    while (result.iterations < max_iter) {
        result.pg_norm = projected_gradient_norm(z, g, bounds);
        if (result.pg_norm <= tol) return result;

        // Two-loop recursion with H0 = gamma * diag(inv_d).
        q = g;
        const std::size_t k = mem.S.size();
        std::vector<double> alpha(k), rho_pair(k);
        for (std::size_t j = k; j-- > 0;) {
            rho_pair[j] = 1.0 / dot(mem.Y[j], mem.S[j]);
            alpha[j] = rho_pair[j] * dot(mem.S[j], q);
            axpy(-alpha[j], mem.Y[j], q);
        }
        double gamma = 1.0;
        if (k > 0) {
            const std::vector<double>& y_last = mem.Y[k - 1];
            double y_dinv_y = 0.0;
            for (std::size_t j = 0; j < dim; ++j) y_dinv_y += y_last[j] * inv_d[j] * y_last[j];
            gamma = dot(mem.S[k - 1], y_last) / y_dinv_y;
        }
        for (std::size_t j = 0; j < dim; ++j) r[j] = gamma * inv_d[j] * q[j];
        for (std::size_t j = 0; j < k; ++j) {
            const double beta = rho_pair[j] * dot(mem.Y[j], r);
            axpy(alpha[j] - beta, mem.S[j], r);
        }
        scal(-1.0, r);  // r is now the search direction
        if (dot(g, r) >= 0.0) {
            mem.clear();
            for (std::size_t j = 0; j < dim; ++j) r[j] = -inv_d[j] * g[j];
        }

        double f_trial = 0.0;
        const auto line_search = [&]() -> bool {
            double step = 1.0;
            for (int h = 0; h < kMaxHalvings; ++h) {
                z_trial = z;
                axpy(step, r, z_trial);
                project(z_trial, bounds);
                double gd = 0.0;
                double d_norm = 0.0;
                for (std::size_t j = 0; j < dim; ++j) {
                    const double dj = z_trial[j] - z[j];
                    gd += g[j] * dj;
                    d_norm += dj * dj;
                }
                if (d_norm == 0.0) return false;
                if (gd < 0.0 && fn.eval(z_trial, f_trial, g_trial) &&
                    f_trial <= f + kArmijo * gd)
                    return true;
                step *= 0.5;
            }
            return false;
        };

        bool accepted = line_search();
        if (!accepted && !mem.S.empty()) {
            // A quasi-Newton direction built from pairs that straddle a
            // change of active set can fail the projected line search even
            // on a convex model.  Retry the iteration along preconditioned
            // steepest descent before declaring a stall.
            mem.clear();
            for (std::size_t j = 0; j < dim; ++j) r[j] = -inv_d[j] * g[j];
            accepted = line_search();
        }
        ++result.iterations;
        if (!accepted) {
            result.stalled = true;
            result.pg_norm = projected_gradient_norm(z, g, bounds);
            return result;
        }

        std::vector<double> s_vec(dim), y_vec(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            s_vec[j] = z_trial[j] - z[j];
            y_vec[j] = g_trial[j] - g[j];
        }
        if (dot(s_vec, y_vec) > 1e-12 * norm2(s_vec) * norm2(y_vec))
            mem.push(std::move(s_vec), std::move(y_vec));
        z.swap(z_trial);
        f = f_trial;
        g.swap(g_trial);
    }
    result.pg_norm = projected_gradient_norm(z, g, bounds);
    return result;
}

void validate(const SolveOptions& opts) {
    if (!(opts.outer_tol > 0.0) || !(opts.inner_tol > 0.0))
        throw std::invalid_argument("solve: tolerances must be positive");
    if (opts.max_outer < 1 || opts.max_inner < 1)
        throw std::invalid_argument("solve: iteration limits must be at least 1");
    if (!(opts.penalty_init > 0.0))
        throw std::invalid_argument("solve: penalty_init must be positive");
    if (!(opts.penalty_growth > 1.0))
        throw std::invalid_argument("solve: penalty_growth must exceed 1");
    if (opts.u_bounds && !(opts.u_bounds->first <= opts.u_bounds->second))
        throw std::invalid_argument("solve: u_bounds lower bound exceeds upper bound");
}

}  // namespace

SolveReport solve(const DiscreteNlp& nlp, const SolveOptions& opts) {
    validate(opts);

    Bounds bounds;
    if (opts.u_bounds) {
        bounds.active = true;
        bounds.lo = opts.u_bounds->first;
        bounds.hi = opts.u_bounds->second;
        const std::size_t n = static_cast<std::size_t>(nlp.n());
        bounds.begin = (nlp.mode() == TranscriptionMode::full) ? nlp.iu(0) : 0;
        bounds.end = bounds.begin + n;
    }

    std::vector<double> z = nlp.initial_point();
    project(z, bounds);
    {
        double f0 = 0.0;
        try {
            f0 = nlp.objective(z);
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("objective is not finite at the initial point: ") +
                                     e.what());
        }
        if (!std::isfinite(f0))
            throw std::runtime_error("objective is not finite at the initial point");
    }

    const std::size_t m = nlp.num_constraints();

    std::vector<double> scale(m, 1.0);
    AlFunction fn(nlp, scale);
    PairMemory mem;

    if (m == 0) {
        // Pure inner minimization: one pass at the final tolerance.
        std::vector<double> lam_empty;
        fn.set_multipliers(&lam_empty, 0.0);
        const std::vector<double> inv_d(nlp.num_variables(), 1.0);
        const InnerResult inner =
            minimize_inner(fn, z, opts.inner_tol, opts.max_inner, inv_d, mem, bounds);
        return SolveReport{.trajectory = nlp.trajectory_from(z),
                           .objective = nlp.objective(z),
                           .max_constraint_violation = 0.0,
                           .inner_iterations = inner.iterations,
                           .outer_iterations = 1,
                           .converged = inner.pg_norm <= opts.inner_tol,
                           .first_order_residual = inner.pg_norm,
                           .multipliers = {},
                           .mode = nlp.mode()};
    }

    scale = nlp.constraint_scaling();
    std::vector<double> lam(m, 0.0);
    double rho = opts.penalty_init;
    double eta = std::max(1e-1, opts.outer_tol);
    double viol_prev = std::numeric_limits<double>::infinity();
    double viol = std::numeric_limits<double>::infinity();
    double res = std::numeric_limits<double>::infinity();
    int total_inner = 0;
    int outer = 0;
    bool converged = false;

    for (outer = 1; outer <= opts.max_outer; ++outer) {
        const double omega =
            std::max(std::min(0.1 * viol_prev, 1e-2), opts.inner_tol);

        // Diagonal preconditioner 1 + obj curvature + rho * scaled-Jacobian
        // column weights; large rho would otherwise wreck the inner scaling.
        const std::vector<double> q = nlp.scaled_jacobian_colsq(z, scale);
        const std::vector<double> curv = nlp.objective_curvature_diag(z);
        std::vector<double> inv_d(z.size());
        for (std::size_t j = 0; j < z.size(); ++j) inv_d[j] = 1.0 / (1.0 + curv[j] + rho * q[j]);

        fn.set_multipliers(&lam, rho);
        const InnerResult inner = minimize_inner(fn, z, omega, opts.max_inner, inv_d, mem, bounds);
        total_inner += inner.iterations;
        const bool inner_done = inner.stalled || inner.pg_norm <= omega;

        const std::vector<double> c = nlp.constraints(z);
        viol = norm_inf(c);
        const bool feas_ok = viol <= std::max(eta, opts.outer_tol);
        if (feas_ok)
            for (std::size_t i = 0; i < m; ++i) lam[i] += rho * scale[i] * c[i];

        std::vector<double> gres = nlp.objective_gradient(z);
        std::vector<double> y(m);
        for (std::size_t i = 0; i < m; ++i) y[i] = scale[i] * lam[i];
        nlp.add_constraint_jtprod(z, y, gres);
        res = projected_gradient_norm(z, gres, bounds);

        if (viol <= opts.outer_tol && res <= 10.0 * opts.inner_tol) {
            converged = true;
            break;
        }
        if (feas_ok) {
            eta = std::max(0.1 * eta, opts.outer_tol);
            // Endgame polish: feasibility is at target and optimality is
            // close but blocked by the penalty conditioning (its rounding
            // floor alone is about rho times machine epsilon), so back the
            // penalty off.  The nearness gate keeps this from firing far
            // from a solution, where shrinking rho just destabilizes the
            // multiplier updates.
            if (viol <= opts.outer_tol && res > 10.0 * opts.inner_tol &&
                res <= 1e3 * opts.inner_tol && rho > opts.penalty_init) {
                rho = std::max(rho / opts.penalty_growth, opts.penalty_init);
                mem.clear();
            }
        }
        if (inner_done && viol > opts.outer_tol && viol > kStallRatio * viol_prev) {
            rho = std::min(rho * opts.penalty_growth, kPenaltyCap);
            eta = std::max(eta, 1e-1);
            mem.clear();
        }
        viol_prev = viol;
    }

    std::vector<double> multipliers(m);
    for (std::size_t i = 0; i < m; ++i) multipliers[i] = scale[i] * lam[i];
    return SolveReport{.trajectory = nlp.trajectory_from(z),
                       .objective = nlp.objective(z),
                       .max_constraint_violation = viol,
                       .inner_iterations = total_inner,
                       .outer_iterations = std::min(outer, opts.max_outer),
                       .converged = converged,
                       .first_order_residual = res,
                       .multipliers = std::move(multipliers),
                       .mode = nlp.mode()};
}

}  // namespace focsolve
