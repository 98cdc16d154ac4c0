#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rsl/flow.hpp"
#include "rsl/geometry.hpp"

using namespace rsl;
using std::numbers::pi;

namespace {

ConformalGrid sine_torus(int n, double L, double eps) {
    ConformalGrid g = ConformalGrid::torus(n, n, L, L);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            g.phi[g.index(i, j)] = eps * std::sin(2.0 * pi * g.x(i) / L);
    return g;
}

ConformalGrid bump_torus(int n, double L, double amp, double width) {
    ConformalGrid g = ConformalGrid::torus(n, n, L, L);
    const double tau = 2.0 * pi;
    const double kx = std::pow(L / (tau * width), 2);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double x = g.x(i), y = g.y(j);
            g.phi[g.index(i, j)] =
                amp * std::exp(kx * (std::cos(tau * (x - 0.3 * L) / L) - 1.0) +
                               kx * (std::cos(tau * (y - 0.55 * L) / L) - 1.0));
        }
    return g;
}

double mode_amplitude(const ConformalGrid& g, double L) {
    double acc = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            acc += g.phi[g.index(i, j)] * std::sin(2.0 * pi * g.x(i) / L);
    return 2.0 * acc / (g.nx * g.ny);
}

}  // namespace

TEST_CASE("flat metrics are stationary") {
    ConformalGrid g = ConformalGrid::torus(16, 16, 1.0, 1.0);
    for (auto& p : g.phi) p = 0.4;
    const ConformalGrid next = step_conformal(g, stability_limit(g, 0.9));
    for (int k = 0; k < g.size(); ++k) CHECK(next.phi[k] == g.phi[k]);

    FlowControls controls;
    controls.dt = stability_limit(g, 0.2);
    controls.t_end = 20 * controls.dt;
    const Trajectory traj = evolve(g, controls);
    for (const auto& snap : traj.snapshots)
        for (int k = 0; k < g.size(); ++k) CHECK(snap.phi[k] == g.phi[k]);
}

TEST_CASE("small sine data decays at the discrete heat rate") {
    const int n = 32;
    const double L = 1.0, eps = 1e-3;
    ConformalGrid g = sine_torus(n, L, eps);
    FlowControls controls;
    controls.dt = 5e-5;
    controls.t_end = 0.01;
    controls.snapshot_stride = 1;
    const Trajectory traj = evolve(g, controls);

    const double h = g.hx;
    const double rate_discrete = 4.0 / (h * h) * std::pow(std::sin(pi * h / L), 2);
    const double rate_continuum = std::pow(2.0 * pi / L, 2);
    const double a0 = mode_amplitude(traj.at(0), L);
    const double aT = mode_amplitude(traj.snapshots.back(), L);
    const double t = traj.snapshots.back().time;
    CHECK(aT / a0 == doctest::Approx(std::exp(-rate_discrete * t)).epsilon(1e-6));
    CHECK(aT / a0 == doctest::Approx(std::exp(-rate_continuum * t)).epsilon(2e-2));
}

TEST_CASE("bump data smooths toward flat") {
    ConformalGrid g = bump_torus(32, 1.0, 0.05, 0.15);
    FlowControls controls;
    controls.dt = stability_limit(g, 0.25);
    controls.t_end = 60 * controls.dt;
    const Trajectory traj = evolve(g, controls);
    CHECK(oracles::max_abs(traj.snapshots.back().phi) < oracles::max_abs(traj.at(0).phi));
}

TEST_CASE("one full RK4 step vs two half steps is fifth-order local") {
    ConformalGrid g = sine_torus(24, 1.0, 0.1);
    auto local_diff = [&](double dt) {
        const ConformalGrid full = step_conformal(g, dt);
        const ConformalGrid half = step_conformal(step_conformal(g, dt / 2), dt / 2);
        double worst = 0.0;
        for (int k = 0; k < g.size(); ++k)
            worst = std::max(worst, std::fabs(full.phi[k] - half.phi[k]));
        return worst;
    };
    const double dt0 = stability_limit(g, 0.5);
    const double d1 = local_diff(dt0);
    const double d2 = local_diff(dt0 / 2);
    CHECK(d1 > 0.0);
    CHECK(d1 / d2 == doctest::Approx(32.0).epsilon(0.3));
}

TEST_CASE("stability guard") {
    ConformalGrid g = sine_torus(16, 1.0, 0.1);
    CHECK_THROWS_AS(step_conformal(g, 1.0), StabilityViolation);

    FlowControls controls;
    controls.dt = 1.0;  // grossly unstable on a 16^2 grid
    controls.t_end = 2.0;
    CHECK_THROWS_AS(evolve(g, controls), StabilityViolation);
}

TEST_CASE("flow equation consistency: d(phi)/dt = -R/2") {
    ConformalGrid g = sine_torus(32, 1.0, 0.05);
    FlowControls controls;
    controls.dt = 4e-5;
    controls.t_end = 10 * controls.dt;
    controls.snapshot_stride = 1;
    const Trajectory traj = evolve(g, controls);
    const std::size_t mid = traj.size() / 2;
    const double span = traj.time(mid + 1) - traj.time(mid - 1);
    const ScalarField r = scalar_curvature(traj.at(mid));
    double worst = 0.0, scale = 0.0;
    for (int k = 0; k < g.size(); ++k) {
        const double fd = (traj.at(mid + 1).phi[k] - traj.at(mid - 1).phi[k]) / span;
        worst = std::max(worst, std::fabs(fd + 0.5 * r[k]));
        scale = std::max(scale, std::fabs(r[k]));
    }
    CHECK(worst <= 1e-9 * scale);
}

TEST_CASE("volume rate identity: d(area)/dt = -integral(R dv)") {
    ConformalGrid g = bump_torus(32, 1.0, 0.05, 0.15);
    FlowControls controls;
    controls.dt = stability_limit(g, 0.2);
    controls.t_end = 10 * controls.dt;
    controls.snapshot_stride = 1;
    const Trajectory traj = evolve(g, controls);
    const std::size_t mid = traj.size() / 2;
    auto area = [](const ConformalGrid& grid) {
        double acc = 0.0;
        for (double v : volume_weights(grid)) acc += v;
        return acc;
    };
    const double fd = (area(traj.at(mid + 1)) - area(traj.at(mid - 1))) /
                      (traj.time(mid + 1) - traj.time(mid - 1));
    const ScalarField r = scalar_curvature(traj.at(mid));
    const ScalarField w = volume_weights(traj.at(mid));
    double rhs = 0.0;
    for (int k = 0; k < g.size(); ++k) rhs -= r[k] * w[k];
    CHECK(fd == doctest::Approx(rhs).epsilon(1e-8));
}

TEST_CASE("trajectories are bit-reproducible") {
    ConformalGrid g = bump_torus(24, 1.0, 0.05, 0.2);
    FlowControls controls;
    controls.dt = stability_limit(g, 0.25);
    controls.t_end = 25 * controls.dt;
    const Trajectory a = evolve(g, controls);
    const Trajectory b = evolve(g, controls);
    REQUIRE(a.size() == b.size());
    for (std::size_t s = 0; s < a.size(); ++s) {
        CHECK(a.time(s) == b.time(s));
        for (int k = 0; k < g.size(); ++k) CHECK(a.at(s).phi[k] == b.at(s).phi[k]);
    }
}

TEST_CASE("dirichlet rectangle: ring held, interior evolves") {
    ConformalGrid g = ConformalGrid::rectangle(24, 24, 1.0, 1.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            g.phi[g.index(i, j)] = 0.1 * std::sin(pi * g.x(i)) * std::sin(pi * g.y(j));
    FlowControls controls;
    controls.dt = stability_limit(g, 0.25);
    controls.t_end = 20 * controls.dt;
    const Trajectory traj = evolve(g, controls);
    const ConformalGrid& last = traj.snapshots.back();
    double interior_change = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int k = g.index(i, j);
            if (g.on_ring(i, j)) {
                CHECK(last.phi[k] == g.phi[k]);
            } else {
                interior_change = std::max(interior_change, std::fabs(last.phi[k] - g.phi[k]));
            }
        }
    CHECK(interior_change > 0.0);
}

TEST_CASE("advance_model returns the closed-form state") {
    const ModelGeometry sphere = ModelGeometry::round_sphere(2, 1.0);
    CHECK(advance_model(sphere, 0.0).sphere_radius_sq(0.0) == doctest::Approx(1.0));
    CHECK(advance_model(sphere, 0.25).sphere_radius_sq(0.0) == doctest::Approx(0.5));
    const ModelGeometry prod = ModelGeometry::sphere_circle_product(1.0, 1.0);
    const ModelGeometry at = advance_model(prod, 0.25);
    CHECK(at.sphere_radius_sq(0.0) == doctest::Approx(0.5));
    CHECK(at.circle_radius() == doctest::Approx(1.0));
    CHECK_THROWS_AS(advance_model(sphere, 0.6), TimeOutOfRange);
}
