#pragma once

#include <span>
#include <string>
#include <vector>

#include "focsolve/focp.hpp"
#include "focsolve/optim.hpp"
#include "focsolve/transcribe.hpp"

namespace focsolve {

// Residuals of the first-order optimality system evaluated at a solve's
// output, with costates recovered from the defect multipliers.
struct PontryaginReport {
    double stationarity_residual = 0.0;  // sup over interior nodes of |dH/du|
    double costate_defect = 0.0;         // sup of the discrete residuals of
                                         // lambdadot_1 = -dH/dx and
                                         // lambdadot_p = -dH/dV_p
    std::vector<double> transversality;  // lambda_p(b) for p = 1..K
    bool endpoint_free = false;          // when true, lambda_1(b) has target 0
    std::string convention_note;         // costate recovery convention
};

// Hamiltonian of the augmented system:
//
//   H = L(t,x,u) + lambda_1 F(t,x,Vbar,u)
//       + sum_{p=2..K} lambda_p (1-p)(t-a)^(p-2) x.
//
// V holds (V_2..V_K), size K-1; lambda holds (lambda_1..lambda_K), size K.
double hamiltonian(const AugmentedSystem& aug, double t, double x,
                   std::span<const double> V, std::span<const double> lambda, double u);

// Checks the necessary conditions at a full-mode solve's output.  The
// costate at node t_{i+1} is recovered from the multiplier of the step-i
// defect row (the multiplier of the rate-normalized defect divided by dt,
// with the discrete-adjoint sign convention); the report's convention_note
// records this.  Throws std::logic_error for a shooting-mode report, where
// per-step defect multipliers do not exist.
PontryaginReport pontryagin_check(const AugmentedSystem& aug, const Grid& grid,
                                  const SolveReport& report,
                                  std::span<const double> multipliers);

}  // namespace focsolve
