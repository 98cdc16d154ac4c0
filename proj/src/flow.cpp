#include "rsl/flow.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsl/geometry.hpp"

namespace rsl {

namespace {

// Right-hand side of d(phi)/dt = e^{-2*phi} * Lap0(phi). Ring nodes of a
// Dirichlet rectangle are held fixed (time-independent boundary data).
ScalarField flow_rhs(const ConformalGrid& g, const ScalarField& phi) {
    ConformalGrid work = g;  // carries topology/spacings; phi swapped in
    work.phi = phi;
    ScalarField rhs = flat_laplacian(work, phi);
    if (g.topology == Topology::PeriodicTorus) {
        for (int k = 0; k < g.size(); ++k) rhs[k] *= std::exp(-2.0 * phi[k]);
        return rhs;
    }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int k = g.index(i, j);
            rhs[k] = g.on_ring(i, j) ? 0.0 : rhs[k] * std::exp(-2.0 * phi[k]);
        }
    return rhs;
}

}  // namespace

double stability_limit(const ConformalGrid& grid, double safety) {
    const double min_phi = *std::min_element(grid.phi.begin(), grid.phi.end());
    const double h = std::min(grid.hx, grid.hy);
    return safety * h * h * std::exp(2.0 * min_phi) / 4.0;
}

ConformalGrid step_conformal(const ConformalGrid& grid, double dt, double safety) {
    if (!(dt > 0.0)) throw Error("flow step requires dt > 0");
    const double limit = stability_limit(grid, safety);
    if (dt > limit)
        throw StabilityViolation("dt " + std::to_string(dt) + " exceeds stability limit " +
                                     std::to_string(limit) + " at t = " +
                                     std::to_string(grid.time),
                                 grid.time);

    const int n = grid.size();
    const ScalarField k1 = flow_rhs(grid, grid.phi);
    ScalarField stage(grid.phi);
    for (int k = 0; k < n; ++k) stage[k] = grid.phi[k] + 0.5 * dt * k1[k];
    const ScalarField k2 = flow_rhs(grid, stage);
    for (int k = 0; k < n; ++k) stage[k] = grid.phi[k] + 0.5 * dt * k2[k];
    const ScalarField k3 = flow_rhs(grid, stage);
    for (int k = 0; k < n; ++k) stage[k] = grid.phi[k] + dt * k3[k];
    const ScalarField k4 = flow_rhs(grid, stage);

    ConformalGrid next = grid;
    for (int k = 0; k < n; ++k)
        next.phi[k] = grid.phi[k] + dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    next.time = grid.time + dt;

    for (double p : next.phi)
        if (!std::isfinite(p) || std::fabs(p) > ConformalGrid::kPhiGuard)
            throw BlowUp("conformal factor left the guard band at t = " +
                             std::to_string(next.time),
                         next.time);
    return next;
}

Trajectory evolve(const ConformalGrid& initial, const FlowControls& controls) {
    initial.validate();
    if (!(controls.dt > 0.0)) throw Error("flow controls require dt > 0");
    if (!(controls.t_end > initial.time)) throw Error("flow controls require t_end > start time");
    if (!(controls.safety > 0.0) || controls.safety > 1.0)
        throw Error("flow safety factor must lie in (0, 1]");
    if (controls.max_steps < 1) throw Error("flow controls require max_steps >= 1");

    const double span = controls.t_end - initial.time;
    const long planned = std::max<long>(1, static_cast<long>(std::ceil(span / controls.dt - 1e-12)));
    long stride = controls.snapshot_stride;
    if (stride <= 0) stride = planned <= 1000 ? 1 : (planned + 999) / 1000;

    Trajectory traj;
    traj.snapshots.push_back(initial);
    ConformalGrid current = initial;
    long step = 0;
    while (current.time < controls.t_end - 1e-15 * span && step < controls.max_steps) {
        const double dt = std::min(controls.dt, controls.t_end - current.time);
        current = step_conformal(current, dt, controls.safety);
        traj.step_dt.push_back(dt);
        ++step;
        const bool at_end = current.time >= controls.t_end - 1e-15 * span;
        if (step % stride == 0 || at_end) traj.snapshots.push_back(current);
    }
    return traj;
}

ModelGeometry advance_model(const ModelGeometry& model, double t) { return model.advanced_to(t); }

}  // namespace rsl
