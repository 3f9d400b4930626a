#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "focsolve/focp.hpp"

namespace focsolve {

// Uniform time grid t_i = a + i*dt, i = 0..n, dt = (b-a)/n.
//
// `a` is the first node; for M = 0 problems the solver offsets it to
// problem.a + dt (see offset_grid) so the dynamics are never evaluated at the
// singular left endpoint.
struct Grid {
    double a;
    double b;
    int n;

    Grid(double a_, double b_, int n_) : a(a_), b(b_), n(n_) {
        if (n < 2) throw std::invalid_argument("Grid: n must be at least 2");
        if (!(b > a)) throw std::invalid_argument("Grid: b must exceed a");
    }
    double dt() const { return (b - a) / n; }
    double node(int i) const { return a + i * dt(); }
};

// Grid whose first node coincides with the problem's left endpoint.
Grid standard_grid(const Focp& problem, int n);

// Grid with the first node at a + dt, dt = (b-a)/(n+1); for M = 0 problems
// whose right-hand side is undefined at t = a.
Grid offset_grid(const Focp& problem, int n);

// Discrete states on a grid: x over all n+1 nodes, piecewise-constant u on
// the first n nodes (u_i active on [t_i, t_{i+1})), and the K-1 moment states
// V_p over all nodes (V[p-2][i]).
struct Trajectory {
    Grid grid;
    std::vector<double> x;
    std::vector<double> u;
    std::vector<std::vector<double>> V;
};

// Raised by simulate when a state becomes non-finite; names the first
// offending step.
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Forward Euler on the augmented system from x_0 = x_a, V_{p,0} = 0:
//   x_{i+1}   = x_i + dt * F(t_i, x_i, Vbar_i, u_i)
//   V_{p,i+1} = V_{p,i} + dt * (1-p) (t_i - a)^(p-2) * x_i
// The t = a limit convention of AugmentedSystem applies at i = 0 on a
// standard grid; (t_0-a)^(p-2) at p = 2 is 0^0 := 1.
Trajectory simulate(const AugmentedSystem& aug, const Grid& grid, std::span<const double> u);

// Left-endpoint Riemann sum dt * sum_{i=0}^{n-1} L(t_i, x_i, u_i).
double discrete_objective(const AugmentedSystem& aug, const Trajectory& traj);

enum class TranscriptionMode { full, shooting };

// The transcribed nonlinear program.
//
// full mode: decision vector (x_1..x_n, V_{2,1..n}, ..., V_{K,1..n},
// u_0..u_{n-1}); equality constraints are the K*n Euler defects
//   x_{i+1} - x_i - dt*F(t_i, x_i, Vbar_i, u_i) = 0
//   V_{p,i+1} - V_{p,i} - dt*(1-p)(t_i-a)^(p-2) x_i = 0        (i = 0..n-1)
// in the order (x-defects, V_2-defects, ..., V_K-defects), plus x_n = x_b
// last when the endpoint is fixed.
//
// shooting mode: decision vector (u_0..u_{n-1}); objective and the optional
// terminal constraint x_n - x_b are compositions with simulate.
//
// Gradients are exact discrete adjoints (reverse sweeps); no finite
// differences anywhere.  All evaluation is pure and reentrant.
class DiscreteNlp {
  public:
    DiscreteNlp(AugmentedSystem aug, Grid grid, TranscriptionMode mode);

    const AugmentedSystem& system() const { return aug_; }
    const Grid& grid() const { return grid_; }
    TranscriptionMode mode() const { return mode_; }
    int n() const { return grid_.n; }
    int K() const { return aug_.K(); }

    std::size_t num_variables() const;
    std::size_t num_constraints() const;

    // Deterministic initial point: controls 0; full mode packs the states
    // simulated with zero controls.
    std::vector<double> initial_point() const;

    double objective(std::span<const double> z) const;
    std::vector<double> objective_gradient(std::span<const double> z) const;
    std::vector<double> constraints(std::span<const double> z) const;

    // out += sum_i y_i * grad c_i(z); `out` must have num_variables entries.
    void add_constraint_jtprod(std::span<const double> z, std::span<const double> y,
                               std::span<double> out) const;

    // Positive row weights equilibrating constraint rows against the largest
    // coefficient their leading variable carries elsewhere in the Jacobian
    // (the V_p defect rows near t = a are otherwise nearly redundant with the
    // heavily-weighted V_p columns of the x defects).  Pure grid function.
    std::vector<double> constraint_scaling() const;

    // q_j = sum_i (s_i * J_ij)^2 for the scaled Jacobian; preconditioner fuel.
    std::vector<double> scaled_jacobian_colsq(std::span<const double> z,
                                              std::span<const double> s) const;

    // Nonnegative diagonal curvature estimate of the objective (full mode:
    // dt * clamp(L_xx, L_uu); shooting: zeros).  Preconditioner fuel.
    std::vector<double> objective_curvature_diag(std::span<const double> z) const;

    // Decision vector -> trajectory (full mode: unpack + prepend x_0, V_0;
    // shooting mode: simulate).
    Trajectory trajectory_from(std::span<const double> z) const;

    // Index helpers for the full-mode layout (i >= 1 for states, p in 2..K).
    std::size_t ix(int i) const { return static_cast<std::size_t>(i - 1); }
    std::size_t iV(int p, int i) const {
        return static_cast<std::size_t>(grid_.n) * (1 + (p - 2)) + static_cast<std::size_t>(i - 1);
    }
    std::size_t iu(int i) const {
        return static_cast<std::size_t>(grid_.n) * aug_.K() + static_cast<std::size_t>(i);
    }

  private:
    // Reverse sweep for shooting mode: gradient of
    // w_obj * objective + w_term * x_n with respect to the controls.
    std::vector<double> shooting_adjoint(std::span<const double> u, double w_obj, double w_term) const;

    AugmentedSystem aug_;
    Grid grid_;
    TranscriptionMode mode_;
    Expr Lxx_, Luu_;  // second partials for the curvature diagonal
    bool curvature_available_;
};

// Builds the NLP; pre: K >= 2 (enforced by build_augmented), grid.n >= 2.
DiscreteNlp transcribe(AugmentedSystem aug, const Grid& grid, TranscriptionMode mode);

// Gradient of the discrete objective with respect to the decision vector.
std::vector<double> gradient(const DiscreteNlp& nlp, std::span<const double> z);

}  // namespace focsolve
