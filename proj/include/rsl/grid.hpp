// Discrete 2-D conformal metrics g = e^{2*phi} (dx^2 + dy^2) on uniform grids.
#pragma once

#include <cstdint>
#include <vector>

#include "rsl/errors.hpp"

namespace rsl {

enum class Topology { PeriodicTorus, DirichletRectangle };

// Nodal values, row-major with index j*nx + i.
using ScalarField = std::vector<double>;

struct ConformalGrid {
    int nx = 0;
    int ny = 0;
    double hx = 0.0;
    double hy = 0.0;
    ScalarField phi;  // log conformal factor per node
    Topology topology = Topology::PeriodicTorus;
    double time = 0.0;

    // Overflow guard: e^{2*phi} must stay well inside double range.
    static constexpr double kPhiGuard = 50.0;
    static constexpr int kMinNodes = 8;

    // Torus covering [0,Lx) x [0,Ly): nodes at i*hx with hx = Lx/nx.
    static ConformalGrid torus(int nx, int ny, double lx, double ly);
    // Closed rectangle [0,Lx] x [0,Ly]: nodes at i*hx with hx = Lx/(nx-1).
    static ConformalGrid rectangle(int nx, int ny, double lx, double ly);

    int index(int i, int j) const { return j * nx + i; }
    int size() const { return nx * ny; }
    double x(int i) const { return i * hx; }
    double y(int j) const { return j * hy; }
    double lx() const { return topology == Topology::PeriodicTorus ? nx * hx : (nx - 1) * hx; }
    double ly() const { return topology == Topology::PeriodicTorus ? ny * hy : (ny - 1) * hy; }

    bool on_ring(int i, int j) const {
        return topology == Topology::DirichletRectangle &&
               (i == 0 || j == 0 || i == nx - 1 || j == ny - 1);
    }

    // Throws InvalidGrid when any structural invariant fails.
    void validate() const;
};

// Marks the open domain D inside the grid. All-true for the torus; for a
// Dirichlet rectangle the outermost ring is always exterior.
struct DomainMask {
    std::vector<std::uint8_t> interior;

    static DomainMask full(const ConformalGrid& grid);
    // Centered sub-rectangle covering `fraction` of each side (Dirichlet only).
    static DomainMask centered_fraction(const ConformalGrid& grid, double fraction);

    bool is_interior(int node) const { return interior[static_cast<std::size_t>(node)] != 0; }
    int interior_count() const;

    // Consistency with the grid topology plus connectivity of the interior.
    void validate(const ConformalGrid& grid) const;
};

}  // namespace rsl
