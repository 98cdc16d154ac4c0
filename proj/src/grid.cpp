#include "rsl/grid.hpp"

#include <cmath>
#include <queue>
#include <string>

namespace rsl {

ConformalGrid ConformalGrid::torus(int nx, int ny, double lx, double ly) {
    ConformalGrid g;
    g.nx = nx;
    g.ny = ny;
    g.hx = lx / nx;
    g.hy = ly / ny;
    g.topology = Topology::PeriodicTorus;
    g.phi.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    g.validate();
    return g;
}

ConformalGrid ConformalGrid::rectangle(int nx, int ny, double lx, double ly) {
    ConformalGrid g;
    g.nx = nx;
    g.ny = ny;
    g.hx = lx / (nx - 1);
    g.hy = ly / (ny - 1);
    g.topology = Topology::DirichletRectangle;
    g.phi.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    g.validate();
    return g;
}

void ConformalGrid::validate() const {
    if (nx < kMinNodes || ny < kMinNodes)
        throw InvalidGrid("grid too coarse: need nx >= 8 and ny >= 8, got " +
                          std::to_string(nx) + "x" + std::to_string(ny));
    if (!(hx > 0.0) || !(hy > 0.0)) throw InvalidGrid("grid spacings must be positive");
    if (phi.size() != static_cast<std::size_t>(nx) * ny)
        throw InvalidGrid("phi field size does not match the grid");
    for (double p : phi) {
        if (!std::isfinite(p)) throw InvalidGrid("phi contains a non-finite value");
        if (std::fabs(p) > kPhiGuard)
            throw InvalidGrid("phi exceeds the overflow guard |phi| <= 50");
    }
}

DomainMask DomainMask::full(const ConformalGrid& grid) {
    DomainMask m;
    m.interior.assign(static_cast<std::size_t>(grid.size()), 1);
    if (grid.topology == Topology::DirichletRectangle) {
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i)
                if (grid.on_ring(i, j)) m.interior[grid.index(i, j)] = 0;
    }
    return m;
}

DomainMask DomainMask::centered_fraction(const ConformalGrid& grid, double fraction) {
    if (grid.topology != Topology::DirichletRectangle)
        throw InvalidGrid("centered_fraction masks apply to Dirichlet rectangles only");
    if (!(fraction > 0.0) || fraction > 1.0)
        throw InvalidGrid("domain fraction must lie in (0, 1]");
    DomainMask m = full(grid);
    const double lx = grid.lx(), ly = grid.ly();
    const double x0 = 0.5 * (1.0 - fraction) * lx, x1 = lx - x0;
    const double y0 = 0.5 * (1.0 - fraction) * ly, y1 = ly - y0;
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i), y = grid.y(j);
            if (!(x > x0 && x < x1 && y > y0 && y < y1)) m.interior[grid.index(i, j)] = 0;
        }
    return m;
}

int DomainMask::interior_count() const {
    int n = 0;
    for (auto v : interior) n += (v != 0);
    return n;
}

void DomainMask::validate(const ConformalGrid& grid) const {
    if (interior.size() != static_cast<std::size_t>(grid.size()))
        throw InvalidGrid("mask size does not match the grid");
    if (grid.topology == Topology::PeriodicTorus) {
        for (auto v : interior)
            if (!v) throw InvalidGrid("torus masks must be all-interior");
        return;
    }
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            if (grid.on_ring(i, j) && interior[grid.index(i, j)])
                throw InvalidGrid("rectangle boundary nodes must be exterior");

    // Interior connectivity (single eigenproblem domain).
    const int n = interior_count();
    if (n == 0) return;  // emptiness is reported by assemble
    int start = -1;
    for (int k = 0; k < grid.size(); ++k)
        if (interior[k]) {
            start = k;
            break;
        }
    std::vector<std::uint8_t> seen(interior.size(), 0);
    std::queue<int> q;
    q.push(start);
    seen[start] = 1;
    int reached = 0;
    while (!q.empty()) {
        const int node = q.front();
        q.pop();
        ++reached;
        const int i = node % grid.nx, j = node / grid.nx;
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            const int ii = i + di[d], jj = j + dj[d];
            if (ii < 0 || jj < 0 || ii >= grid.nx || jj >= grid.ny) continue;
            const int nb = grid.index(ii, jj);
            if (interior[nb] && !seen[nb]) {
                seen[nb] = 1;
                q.push(nb);
            }
        }
    }
    if (reached != n) throw InvalidGrid("mask interior is not connected");
}

}  // namespace rsl
