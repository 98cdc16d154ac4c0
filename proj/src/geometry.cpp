#include "rsl/geometry.hpp"

#include <cmath>

namespace rsl {

namespace {

inline int wrap(int i, int n) { return (i % n + n) % n; }

// One-sided second-order second derivative along one axis at an edge node.
inline double one_sided_dd(const double* u, int stride, double h) {
    return (2.0 * u[0] - 5.0 * u[stride] + 4.0 * u[2 * stride] - u[3 * stride]) / (h * h);
}

}  // namespace

ScalarField flat_laplacian(const ConformalGrid& g, const ScalarField& u) {
    ScalarField out(u.size(), 0.0);
    const double ihx2 = 1.0 / (g.hx * g.hx), ihy2 = 1.0 / (g.hy * g.hy);
    if (g.topology == Topology::PeriodicTorus) {
        for (int j = 0; j < g.ny; ++j) {
            const int jm = wrap(j - 1, g.ny), jp = wrap(j + 1, g.ny);
            for (int i = 0; i < g.nx; ++i) {
                const int im = wrap(i - 1, g.nx), ip = wrap(i + 1, g.nx);
                const double c = u[g.index(i, j)];
                out[g.index(i, j)] =
                    (u[g.index(ip, j)] - 2.0 * c + u[g.index(im, j)]) * ihx2 +
                    (u[g.index(i, jp)] - 2.0 * c + u[g.index(i, jm)]) * ihy2;
            }
        }
        return out;
    }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double dxx, dyy;
            const double* base = u.data() + g.index(i, j);
            if (i == 0)
                dxx = one_sided_dd(base, 1, g.hx);
            else if (i == g.nx - 1)
                dxx = one_sided_dd(base, -1, g.hx);
            else
                dxx = (u[g.index(i + 1, j)] - 2.0 * u[g.index(i, j)] + u[g.index(i - 1, j)]) * ihx2;
            if (j == 0)
                dyy = one_sided_dd(base, g.nx, g.hy);
            else if (j == g.ny - 1)
                dyy = one_sided_dd(base, -g.nx, g.hy);
            else
                dyy = (u[g.index(i, j + 1)] - 2.0 * u[g.index(i, j)] + u[g.index(i, j - 1)]) * ihy2;
            out[g.index(i, j)] = dxx + dyy;
        }
    return out;
}

ScalarField scalar_curvature(const ConformalGrid& g) {
    ScalarField lap = flat_laplacian(g, g.phi);
    for (int k = 0; k < g.size(); ++k) lap[k] *= -2.0 * std::exp(-2.0 * g.phi[k]);
    return lap;
}

ScalarField volume_weights(const ConformalGrid& g) {
    ScalarField w(static_cast<std::size_t>(g.size()));
    const double cell = g.hx * g.hy;
    for (int k = 0; k < g.size(); ++k) w[k] = std::exp(2.0 * g.phi[k]) * cell;
    return w;
}

ScalarField laplace_beltrami_apply(const ConformalGrid& g, const ScalarField& u) {
    ScalarField out(u.size(), 0.0);
    const double ihx2 = 1.0 / (g.hx * g.hx), ihy2 = 1.0 / (g.hy * g.hy);
    if (g.topology == Topology::PeriodicTorus) {
        for (int j = 0; j < g.ny; ++j) {
            const int jm = wrap(j - 1, g.ny), jp = wrap(j + 1, g.ny);
            for (int i = 0; i < g.nx; ++i) {
                const int im = wrap(i - 1, g.nx), ip = wrap(i + 1, g.nx);
                const int k = g.index(i, j);
                const double lap = (u[g.index(ip, j)] - 2.0 * u[k] + u[g.index(im, j)]) * ihx2 +
                                   (u[g.index(i, jp)] - 2.0 * u[k] + u[g.index(i, jm)]) * ihy2;
                out[k] = std::exp(-2.0 * g.phi[k]) * lap;
            }
        }
        return out;
    }
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            const int k = g.index(i, j);
            const double lap = (u[g.index(i + 1, j)] - 2.0 * u[k] + u[g.index(i - 1, j)]) * ihx2 +
                               (u[g.index(i, j + 1)] - 2.0 * u[k] + u[g.index(i, j - 1)]) * ihy2;
            out[k] = std::exp(-2.0 * g.phi[k]) * lap;
        }
    return out;
}

double dirichlet_energy(const ConformalGrid& g, const ScalarField& u, const ScalarField& v) {
    // Edge-midpoint differences; conformal weight cancels in 2-D, so the form
    // is the flat one and pairs exactly with the 5-point operator.
    double acc = 0.0;
    const double wx = g.hy / g.hx, wy = g.hx / g.hy;
    if (g.topology == Topology::PeriodicTorus) {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const int k = g.index(i, j);
                const int kx = g.index(wrap(i + 1, g.nx), j);
                const int ky = g.index(i, wrap(j + 1, g.ny));
                acc += (u[kx] - u[k]) * (v[kx] - v[k]) * wx;
                acc += (u[ky] - u[k]) * (v[ky] - v[k]) * wy;
            }
        return acc;
    }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i) {
            const int k = g.index(i, j), kx = g.index(i + 1, j);
            acc += (u[kx] - u[k]) * (v[kx] - v[k]) * wx;
        }
    for (int j = 0; j + 1 < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int k = g.index(i, j), ky = g.index(i, j + 1);
            acc += (u[ky] - u[k]) * (v[ky] - v[k]) * wy;
        }
    return acc;
}

}  // namespace rsl
