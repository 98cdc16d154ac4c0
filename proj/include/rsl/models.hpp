// Closed-form Ricci flow solution families with analytic curvature,
// Einstein-tensor bounds and full eigenvalue trajectories.
#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "rsl/errors.hpp"

namespace rsl {

enum class ModelFamily { RoundSphere, HyperbolicScaled, FlatTorus, SphereCircleProduct };

// Extreme relative eigenvalues of the Einstein tensor, i.e. of g^{-1} E
// with E_ij = R_ij - (R/2) g_ij.
struct EinsteinBounds {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

class ModelGeometry {
  public:
    static constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

    // Round n-sphere of initial radius r0; r(t)^2 = r0^2 - 2(n-1)t.
    static ModelGeometry round_sphere(int dim, double radius);
    // Compact hyperbolic surface, g(t) = (c0 + 2t)/c0 * g(0), Gauss curvature
    // -1/(c0+2t). Eigenvalues require a user-supplied initial spectrum.
    static ModelGeometry hyperbolic_scaled(double scale, std::vector<double> spectrum = {});
    // Flat torus with side lengths Lx, Ly; stationary under the flow.
    static ModelGeometry flat_torus(double lx, double ly);
    // S^2(a0) x S^1(b0); the sphere factor shrinks, the circle is static.
    static ModelGeometry sphere_circle_product(double sphere_radius, double circle_radius);

    ModelFamily family() const { return family_; }
    int dim() const { return dim_; }

    double maximal_time() const;

    // Spatially constant scalar curvature at time t.
    double scalar_curvature(double t) const;

    EinsteinBounds einstein_bounds(double t) const;

    // k-th rung of the nonzero eigenvalue ladder, k >= 1. The ladder ordering
    // is frozen at t = 0 so branches stay smooth in t.
    double eigenvalue(int mode, double t) const;

    // Closed-form right-hand side of the eigenvalue rate:
    // mu' = mu*R + 2*integral(E_ij f_i f_j).
    double rate_prediction(int mode, double t) const;

    // (l, m) decomposition of a SphereCircleProduct mode.
    std::pair<int, int> product_mode(int mode) const;

    // Relative volume scale factor (d/dt of it equals -R times it).
    double volume_scale(double t) const;

    // Model re-based so its initial data is the state at time t.
    ModelGeometry advanced_to(double t) const;

    // Family scale parameters at time t.
    double sphere_radius_sq(double t) const;     // RoundSphere, SphereCircleProduct (a^2)
    double hyperbolic_scale(double t) const;     // HyperbolicScaled: c0 + 2t
    double circle_radius() const { return circle_radius_; }

    const std::vector<double>& initial_spectrum() const { return spectrum_; }

  private:
    ModelGeometry() = default;
    void require_time(double t) const;

    ModelFamily family_ = ModelFamily::FlatTorus;
    int dim_ = 2;
    double radius_ = 0.0;         // sphere r0 / product a0
    double scale_ = 0.0;          // hyperbolic c0
    double torus_lx_ = 0.0;
    double torus_ly_ = 0.0;
    double circle_radius_ = 0.0;  // product b0
    std::vector<double> spectrum_;            // hyperbolic initial eigenvalues, ascending
    std::vector<double> torus_ladder_;        // distinct nonzero torus eigenvalues
    std::vector<std::pair<int, int>> product_ladder_;  // (l, m) ordered at t = 0
};

}  // namespace rsl
