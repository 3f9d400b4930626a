#include "focsolve/transcribe.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <utility>

namespace focsolve {

Grid standard_grid(const Focp& problem, int n) { return Grid(problem.a, problem.b, n); }

Grid offset_grid(const Focp& problem, int n) {
    const double dt = (problem.b - problem.a) / (n + 1);
    return Grid(problem.a + dt, problem.b, n);
}

Trajectory simulate(const AugmentedSystem& aug, const Grid& grid, std::span<const double> u) {
    const int n = grid.n;
    const int K = aug.K();
    if (static_cast<int>(u.size()) != n)
        throw std::invalid_argument("simulate: control sequence must have n entries");
    const double dt = grid.dt();
    Trajectory traj{grid, std::vector<double>(n + 1), std::vector<double>(u.begin(), u.end()),
                    std::vector<std::vector<double>>(K - 1, std::vector<double>(n + 1, 0.0))};
    traj.x[0] = aug.problem().x_a;
    std::vector<double> Vi(K - 1, 0.0);
    for (int i = 0; i < n; ++i) {
        const double t = grid.node(i);
        const double xi = traj.x[i];
        double xnext;
        try {
            xnext = xi + dt * aug.F(t, xi, Vi, u[i]);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "dynamics evaluation failed at step " << i + 1 << " (t = " << t
                << "): " << e.what();
            throw SimulationError(msg.str());
        }
        if (!std::isfinite(xnext)) {
            std::ostringstream msg;
            msg << "simulation produced a non-finite state at step " << i + 1 << " (t = " << grid.node(i + 1) << ")";
            throw SimulationError(msg.str());
        }
        traj.x[i + 1] = xnext;
        for (int p = 2; p <= K; ++p) {
            Vi[p - 2] += dt * aug.g(t, p) * xi;
            if (!std::isfinite(Vi[p - 2])) {
                std::ostringstream msg;
                msg << "simulation produced a non-finite moment state V_" << p << " at step " << i + 1;
                throw SimulationError(msg.str());
            }
            traj.V[p - 2][i + 1] = Vi[p - 2];
        }
    }
    return traj;
}

double discrete_objective(const AugmentedSystem& aug, const Trajectory& traj) {
    const int n = traj.grid.n;
    const double dt = traj.grid.dt();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += aug.L(traj.grid.node(i), traj.x[i], traj.u[i]);
    return dt * sum;
}

DiscreteNlp::DiscreteNlp(AugmentedSystem aug, Grid grid, TranscriptionMode mode)
    : aug_(std::move(aug)), grid_(grid), mode_(mode), curvature_available_(false) {
    try {
        Lxx_ = diff_expr(diff_expr(aug_.problem().L, 'x'), 'x');
        Luu_ = diff_expr(diff_expr(aug_.problem().L, 'u'), 'u');
        curvature_available_ = true;
    } catch (const DiffError&) {
        // Second derivatives unavailable; the curvature diagonal stays zero.
    }
}

DiscreteNlp transcribe(AugmentedSystem aug, const Grid& grid, TranscriptionMode mode) {
    return DiscreteNlp(std::move(aug), grid, mode);
}

std::size_t DiscreteNlp::num_variables() const {
    const auto n = static_cast<std::size_t>(grid_.n);
    if (mode_ == TranscriptionMode::shooting) return n;
    return n * (aug_.K() + 1);
}

std::size_t DiscreteNlp::num_constraints() const {
    const bool fixed = aug_.problem().x_b.has_value();
    if (mode_ == TranscriptionMode::shooting) return fixed ? 1 : 0;
    return static_cast<std::size_t>(grid_.n) * aug_.K() + (fixed ? 1 : 0);
}

std::vector<double> DiscreteNlp::initial_point() const {
    const int n = grid_.n;
    if (mode_ == TranscriptionMode::shooting) return std::vector<double>(n, 0.0);
    std::vector<double> z(num_variables(), 0.0);
    const std::vector<double> u0(n, 0.0);
    const Trajectory traj = simulate(aug_, grid_, u0);
    for (int i = 1; i <= n; ++i) {
        z[ix(i)] = traj.x[i];
        for (int p = 2; p <= aug_.K(); ++p) z[iV(p, i)] = traj.V[p - 2][i];
    }
    return z;
}

Trajectory DiscreteNlp::trajectory_from(std::span<const double> z) const {
    assert(z.size() == num_variables());
    const int n = grid_.n;
    const int K = aug_.K();
    if (mode_ == TranscriptionMode::shooting) return simulate(aug_, grid_, z);
    Trajectory traj{grid_, std::vector<double>(n + 1), std::vector<double>(n),
                    std::vector<std::vector<double>>(K - 1, std::vector<double>(n + 1, 0.0))};
    traj.x[0] = aug_.problem().x_a;
    for (int i = 1; i <= n; ++i) {
        traj.x[i] = z[ix(i)];
        for (int p = 2; p <= K; ++p) traj.V[p - 2][i] = z[iV(p, i)];
    }
    for (int i = 0; i < n; ++i) traj.u[i] = z[iu(i)];
    return traj;
}

double DiscreteNlp::objective(std::span<const double> z) const {
    assert(z.size() == num_variables());
    if (mode_ == TranscriptionMode::shooting) {
        const Trajectory traj = simulate(aug_, grid_, z);
        return discrete_objective(aug_, traj);
    }
    const int n = grid_.n;
    const double x_a = aug_.problem().x_a;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double xi = i == 0 ? x_a : z[ix(i)];
        sum += aug_.L(grid_.node(i), xi, z[iu(i)]);
    }
    return grid_.dt() * sum;
}

std::vector<double> DiscreteNlp::shooting_adjoint(std::span<const double> u, double w_obj,
                                                  double w_term) const {
    const int n = grid_.n;
    const int K = aug_.K();
    const double dt = grid_.dt();
    const Trajectory traj = simulate(aug_, grid_, u);
    std::vector<double> grad(n, 0.0);
    double px = w_term;                      // adjoint of x_{i+1}
    std::vector<double> pV(K - 1, 0.0);      // adjoints of V_{p,i+1}
    std::vector<double> Vi(K - 1);
    for (int i = n - 1; i >= 0; --i) {
        const double t = grid_.node(i);
        const double xi = traj.x[i];
        const double ui = u[i];
        for (int p = 2; p <= K; ++p) Vi[p - 2] = traj.V[p - 2][i];
        grad[i] = px * dt * aug_.dF_du(t, xi, ui) + w_obj * dt * aug_.L_u(t, xi, ui);
        double px_prev = px * (1.0 + dt * aug_.dF_dx(t, xi, ui)) + w_obj * dt * aug_.L_x(t, xi, ui);
        for (int p = 2; p <= K; ++p) {
            px_prev += pV[p - 2] * dt * aug_.g(t, p);
            pV[p - 2] += px * dt * aug_.dF_dV(t, p);
        }
        px = px_prev;
    }
    return grad;
}

std::vector<double> DiscreteNlp::objective_gradient(std::span<const double> z) const {
    assert(z.size() == num_variables());
    if (mode_ == TranscriptionMode::shooting) return shooting_adjoint(z, 1.0, 0.0);
    const int n = grid_.n;
    const double dt = grid_.dt();
    const double x_a = aug_.problem().x_a;
    std::vector<double> grad(num_variables(), 0.0);
    for (int i = 0; i < n; ++i) {
        const double t = grid_.node(i);
        const double xi = i == 0 ? x_a : z[ix(i)];
        const double ui = z[iu(i)];
        grad[iu(i)] = dt * aug_.L_u(t, xi, ui);
        if (i >= 1) grad[ix(i)] = dt * aug_.L_x(t, xi, ui);
    }
    return grad;
}

std::vector<double> DiscreteNlp::constraints(std::span<const double> z) const {
    assert(z.size() == num_variables());
    const int n = grid_.n;
    const int K = aug_.K();
    const double dt = grid_.dt();
    const Focp& pr = aug_.problem();
    std::vector<double> c(num_constraints(), 0.0);
    if (mode_ == TranscriptionMode::shooting) {
        if (pr.x_b) {
            const Trajectory traj = simulate(aug_, grid_, z);
            c[0] = traj.x[n] - *pr.x_b;
        }
        return c;
    }
    std::vector<double> Vi(K - 1);
    for (int i = 0; i < n; ++i) {
        const double t = grid_.node(i);
        const double xi = i == 0 ? pr.x_a : z[ix(i)];
        for (int p = 2; p <= K; ++p) Vi[p - 2] = i == 0 ? 0.0 : z[iV(p, i)];
        // Step values are formed with the exact expressions simulate() uses,
        // so a decision vector packed from a simulated trajectory yields
        // bit-exact zero defects.
        const double xnext = xi + dt * aug_.F(t, xi, Vi, z[iu(i)]);
        c[i] = z[ix(i + 1)] - xnext;
        for (int p = 2; p <= K; ++p) {
            const double vnext = Vi[p - 2] + dt * aug_.g(t, p) * xi;
            c[(p - 1) * n + i] = z[iV(p, i + 1)] - vnext;
        }
    }
    if (pr.x_b) c[static_cast<std::size_t>(K) * n] = z[ix(n)] - *pr.x_b;
    return c;
}

void DiscreteNlp::add_constraint_jtprod(std::span<const double> z, std::span<const double> y,
                                        std::span<double> out) const {
    assert(z.size() == num_variables());
    assert(y.size() == num_constraints());
    assert(out.size() == num_variables());
    const int n = grid_.n;
    const int K = aug_.K();
    const double dt = grid_.dt();
    const Focp& pr = aug_.problem();
    if (mode_ == TranscriptionMode::shooting) {
        if (pr.x_b && y[0] != 0.0) {
            const std::vector<double> g = shooting_adjoint(z, 0.0, y[0]);
            for (int i = 0; i < n; ++i) out[i] += g[i];
        }
        return;
    }
    for (int i = 0; i < n; ++i) {
        const double t = grid_.node(i);
        const double xi = i == 0 ? pr.x_a : z[ix(i)];
        const double ui = z[iu(i)];
        const double w = y[i];  // x-defect row i
        if (w != 0.0) {
            out[ix(i + 1)] += w;
            if (i >= 1) out[ix(i)] -= w * (1.0 + dt * aug_.dF_dx(t, xi, ui));
            out[iu(i)] -= w * dt * aug_.dF_du(t, xi, ui);
            if (i >= 1)
                for (int p = 2; p <= K; ++p) out[iV(p, i)] -= w * dt * aug_.dF_dV(t, p);
        }
        for (int p = 2; p <= K; ++p) {
            const double wv = y[(p - 1) * n + i];  // V_p-defect row i
            if (wv == 0.0) continue;
            out[iV(p, i + 1)] += wv;
            if (i >= 1) {
                out[iV(p, i)] -= wv;
                out[ix(i)] -= wv * dt * aug_.g(t, p);
            }
        }
    }
    if (pr.x_b) out[ix(n)] += y[static_cast<std::size_t>(K) * n];
}

std::vector<double> DiscreteNlp::constraint_scaling() const {
    std::vector<double> s(num_constraints(), 1.0);
    if (mode_ == TranscriptionMode::shooting) return s;
    const int n = grid_.n;
    const int K = aug_.K();
    const double dt = grid_.dt();
    for (int p = 2; p <= K; ++p)
        for (int i = 0; i + 1 < n; ++i) {
            // V_{p,i+1}'s coefficient in x-defect row i+1.
            const double lever = dt * std::abs(aug_.dF_dV(grid_.node(i + 1), p));
            s[(p - 1) * n + i] = std::max(1.0, lever);
        }
    return s;
}

std::vector<double> DiscreteNlp::scaled_jacobian_colsq(std::span<const double> z,
                                                       std::span<const double> s) const {
    assert(s.size() == num_constraints());
    const int n = grid_.n;
    const int K = aug_.K();
    const double dt = grid_.dt();
    const Focp& pr = aug_.problem();
    std::vector<double> q(num_variables(), 0.0);
    if (mode_ == TranscriptionMode::shooting) {
        if (pr.x_b) {
            const std::vector<double> g = shooting_adjoint(z, 0.0, 1.0);
            for (int i = 0; i < n; ++i) q[i] = (s[0] * g[i]) * (s[0] * g[i]);
        }
        return q;
    }
    for (int i = 0; i < n; ++i) {
        const double t = grid_.node(i);
        const double xi = i == 0 ? pr.x_a : z[ix(i)];
        const double ui = z[iu(i)];
        const double sx = s[i];  // x-defect row i (scaling 1 by construction)
        q[ix(i + 1)] += sx * sx;
        if (i >= 1) {
            const double cx = sx * (1.0 + dt * aug_.dF_dx(t, xi, ui));
            q[ix(i)] += cx * cx;
        }
        const double cu = sx * dt * aug_.dF_du(t, xi, ui);
        q[iu(i)] += cu * cu;
        if (i >= 1)
            for (int p = 2; p <= K; ++p) {
                const double cv = sx * dt * aug_.dF_dV(t, p);
                q[iV(p, i)] += cv * cv;
            }
        for (int p = 2; p <= K; ++p) {
            const double sv = s[(p - 1) * n + i];
            q[iV(p, i + 1)] += sv * sv;
            if (i >= 1) {
                q[iV(p, i)] += sv * sv;
                const double cg = sv * dt * aug_.g(t, p);
                q[ix(i)] += cg * cg;
            }
        }
    }
    if (pr.x_b) {
        const double st = s[static_cast<std::size_t>(K) * n];
        q[ix(n)] += st * st;
    }
    return q;
}

std::vector<double> DiscreteNlp::objective_curvature_diag(std::span<const double> z) const {
    std::vector<double> d(num_variables(), 0.0);
    if (mode_ == TranscriptionMode::shooting || !curvature_available_) return d;
    const int n = grid_.n;
    const double dt = grid_.dt();
    const double x_a = aug_.problem().x_a;
    for (int i = 0; i < n; ++i) {
        const double t = grid_.node(i);
        const double xi = i == 0 ? x_a : z[ix(i)];
        const double ui = z[iu(i)];
        d[iu(i)] = dt * std::max(0.0, eval_expr(Luu_, t, xi, ui));
        if (i >= 1) d[ix(i)] = dt * std::max(0.0, eval_expr(Lxx_, t, xi, ui));
    }
    return d;
}

std::vector<double> gradient(const DiscreteNlp& nlp, std::span<const double> z) {
    return nlp.objective_gradient(z);
}

}  // namespace focsolve
