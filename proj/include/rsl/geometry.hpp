// Differential-geometric quantities of a conformal grid metric: scalar
// curvature, volume weights, Laplace-Beltrami action and the Dirichlet form.
#pragma once

#include "rsl/grid.hpp"

namespace rsl {

// Flat 5-point Laplacian of u. Periodic wrap on the torus; on a Dirichlet
// rectangle the ring nodes use one-sided second-order stencils.
ScalarField flat_laplacian(const ConformalGrid& grid, const ScalarField& u);

// Scalar curvature R = -2 e^{-2*phi} * Lap0(phi) per node.
ScalarField scalar_curvature(const ConformalGrid& grid);

// Nodal quadrature weight for integrals against dv: e^{2*phi} * hx * hy.
ScalarField volume_weights(const ConformalGrid& grid);

// Delta_g u = e^{-2*phi} * Lap0(u) at interior nodes. For the Dirichlet
// rectangle, u must vanish on exterior nodes and the ring output is zero.
ScalarField laplace_beltrami_apply(const ConformalGrid& grid, const ScalarField& u);

// Dirichlet form integral(g^{ij} u_i v_j dv). In 2-D conformal coordinates
// the conformal weight cancels, leaving the flat edge-midpoint form; it is
// summation-by-parts exact against laplace_beltrami_apply.
double dirichlet_energy(const ConformalGrid& grid, const ScalarField& u, const ScalarField& v);

}  // namespace rsl
