// Numerical verification of the evolution identities along the flow: volume
// element, inverse metric, Laplacian variation, the integral variation chain
// and the contracted Bianchi identity.
#pragma once

#include <cmath>
#include <string>

#include "rsl/flow.hpp"
#include "rsl/grid.hpp"
#include "rsl/models.hpp"

namespace rsl {

struct IdentityCheck {
    std::string name;
    double max_abs_err = 0.0;
    double rel_err = 0.0;       // max_abs_err / field scale
    double lhs_at_max = 0.0;    // sampled values at the worst node
    double rhs_at_max = 0.0;
    double order_estimate = std::numeric_limits<double>::quiet_NaN();
    bool exact_zero = false;    // both sides at machine zero
};

// d(dv)/dt = -R dv, compared nodewise by central difference around
// snapshot i. Throws IndexOutOfRange unless 1 <= i <= len-2.
IdentityCheck check_volume_evolution(const Trajectory& traj, std::size_t i);

// d(g^{ij})/dt = 2 R^{ij}: conformal reduction compares the central
// difference of e^{-2*phi} against R e^{-2*phi}.
IdentityCheck check_inverse_metric_evolution(const Trajectory& traj, std::size_t i);

// d(Delta u)/dt = R * Delta u (2-D form) for a fixed test field u.
IdentityCheck check_laplacian_variation(const Trajectory& traj, std::size_t i,
                                        const ScalarField& u);

// 2 R_{ij;j} = R_i via two independent discrete routes: divergence of
// (R/2) g versus the direct gradient of R.
IdentityCheck check_bianchi(const ConformalGrid& grid);
IdentityCheck check_bianchi_model(const ModelGeometry& model, double t);

// Integral chain 2*I(R^{ij}u_i v_j) - I(R u^i v_i) = -I(D'u v) + I(Du v R)
// with the four integrals on independent quadratures.
IdentityCheck check_eq6_chain(const Trajectory& traj, std::size_t i, const ScalarField& u,
                              const ScalarField& v);

// Model-lane variants (closed-form scale factors, small-step differences).
IdentityCheck model_volume_evolution_check(const ModelGeometry& model, double t, double fd_step);
IdentityCheck model_inverse_metric_check(const ModelGeometry& model, double t, double fd_step);
IdentityCheck model_laplacian_variation_check(const ModelGeometry& model, int mode, double t,
                                              double fd_step);

// Empirical convergence order when h halves: log2(err_coarse / err_fine).
double estimate_order(double err_coarse, double err_fine);

// Default test fields for the identity checks (smooth, boundary compatible).
ScalarField default_test_field_u(const ConformalGrid& grid);
ScalarField default_test_field_v(const ConformalGrid& grid);

}  // namespace rsl
