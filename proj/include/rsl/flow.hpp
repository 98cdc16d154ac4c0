// Time integration of the Ricci-Hamilton flow. On conformal grids the flow
// closes as the scalar PDE d(phi)/dt = e^{-2*phi} * Lap0(phi); model
// geometries advance in closed form.
#pragma once

#include <cstddef>
#include <vector>

#include "rsl/grid.hpp"
#include "rsl/models.hpp"

namespace rsl {

struct FlowControls {
    double dt = 0.0;
    double t_end = 0.0;
    double safety = 0.25;        // CFL safety factor in (0, 1]
    long max_steps = 1000000;
    int snapshot_stride = 0;     // 0 = auto (every step up to ~1000 snapshots)
};

struct Trajectory {
    std::vector<ConformalGrid> snapshots;  // times strictly increasing
    std::vector<double> step_dt;           // dt actually used per step

    std::size_t size() const { return snapshots.size(); }
    const ConformalGrid& at(std::size_t i) const { return snapshots[i]; }
    double time(std::size_t i) const { return snapshots[i].time; }
};

// Largest stable explicit step for the current metric.
double stability_limit(const ConformalGrid& grid, double safety);

// One classical RK4 step. Throws StabilityViolation when dt exceeds the
// stability bound, BlowUp when |phi| leaves the guard band afterwards.
// On a Dirichlet rectangle the ring values are held fixed.
ConformalGrid step_conformal(const ConformalGrid& grid, double dt, double safety = 1.0);

// Repeated stepping until t_end or max_steps, recording snapshots.
Trajectory evolve(const ConformalGrid& initial, const FlowControls& controls);

// Closed-form advance: returns the model re-based at time t.
ModelGeometry advance_model(const ModelGeometry& model, double t);

}  // namespace rsl
