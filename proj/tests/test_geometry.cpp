#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rsl/geometry.hpp"

using namespace rsl;
using std::numbers::pi;

namespace {

ConformalGrid sinx_torus(int n, double L, double eps) {
    ConformalGrid g = ConformalGrid::torus(n, n, L, L);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            g.phi[g.index(i, j)] = eps * std::sin(2.0 * pi * g.x(i) / L);
    return g;
}

double curvature_oracle_err(int n, double L, double eps) {
    // Symbolic oracle: R = 2 eps (2 pi / L)^2 sin(2 pi x / L) e^{-2 phi}.
    ConformalGrid g = sinx_torus(n, L, eps);
    const ScalarField r = scalar_curvature(g);
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double phi = g.phi[g.index(i, j)];
            const double exact = 2.0 * eps * std::pow(2.0 * pi / L, 2) *
                                 std::sin(2.0 * pi * g.x(i) / L) * std::exp(-2.0 * phi);
            worst = std::max(worst, std::fabs(r[g.index(i, j)] - exact));
        }
    return worst;
}

}  // namespace

TEST_CASE("flat and constant conformal factors are scalar flat") {
    ConformalGrid flat = ConformalGrid::torus(16, 16, 1.0, 1.0);
    for (double v : scalar_curvature(flat)) CHECK(std::fabs(v) <= 1e-14);

    ConformalGrid shifted = flat;
    for (auto& p : shifted.phi) p = 0.37;
    for (double v : scalar_curvature(shifted)) CHECK(std::fabs(v) <= 1e-12);

    ConformalGrid rect = ConformalGrid::rectangle(17, 17, 1.0, 1.0);
    for (auto& p : rect.phi) p = -0.11;
    for (double v : scalar_curvature(rect)) CHECK(std::fabs(v) <= 1e-12);
}

TEST_CASE("curvature matches the symbolic oracle at second order") {
    const double e32 = curvature_oracle_err(32, 1.0, 0.1);
    const double e64 = curvature_oracle_err(64, 1.0, 0.1);
    CHECK(e32 < 0.05);
    CHECK(e32 / e64 >= 3.5);  // grid-refinement order
}

TEST_CASE("curvature conformal shift covariance") {
    ConformalGrid g = sinx_torus(24, 1.0, 0.2);
    const ScalarField base = scalar_curvature(g);
    ConformalGrid shifted = g;
    const double c = 0.7;
    for (auto& p : shifted.phi) p += c;
    const ScalarField scaled = scalar_curvature(shifted);
    const double factor = std::exp(-2.0 * c);
    for (int k = 0; k < g.size(); ++k)
        CHECK(scaled[k] == doctest::Approx(factor * base[k]).epsilon(1e-12));
}

TEST_CASE("gauss-bonnet: total curvature of a torus vanishes") {
    ConformalGrid g = sinx_torus(48, 2.0, 0.15);
    const ScalarField r = scalar_curvature(g);
    const ScalarField w = volume_weights(g);
    double total = 0.0, area = 0.0;
    for (int k = 0; k < g.size(); ++k) {
        total += r[k] * w[k];
        area += w[k];
    }
    CHECK(std::fabs(total) <= 1e-10 * area);
}

TEST_CASE("volume weights") {
    SUBCASE("flat unit square") {
        ConformalGrid g = ConformalGrid::rectangle(65, 65, 1.0, 1.0);
        const ScalarField w = volume_weights(g);
        const double cell = g.hx * g.hy;  // = 1/64^2
        for (double v : w) CHECK(v == doctest::Approx(cell).epsilon(1e-15));
    }
    SUBCASE("phi = ln(2)/2 doubles every weight") {
        ConformalGrid g = ConformalGrid::torus(16, 16, 1.0, 1.0);
        const ScalarField flat = volume_weights(g);
        for (auto& p : g.phi) p = 0.5 * std::log(2.0);
        const ScalarField doubled = volume_weights(g);
        for (int k = 0; k < g.size(); ++k)
            CHECK(doubled[k] == doctest::Approx(2.0 * flat[k]).epsilon(1e-14));
    }
    SUBCASE("torus area against the quadrature oracle") {
        const double L = 1.5, eps = 0.12;
        ConformalGrid g = sinx_torus(64, L, eps);
        double total = 0.0;
        for (double v : volume_weights(g)) total += v;
        // area = L * integral e^{2 eps sin(2 pi x / L)} dx
        const double oracle =
            L * oracles::simpson([&](double x) { return std::exp(2.0 * eps *
                                                                 std::sin(2.0 * pi * x / L)); },
                                 0.0, L, 100000);
        CHECK(total == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("laplace-beltrami on closed forms") {
    const int n = 48;
    const double L = 1.0;
    SUBCASE("constants are harmonic on the torus") {
        ConformalGrid g = sinx_torus(n, L, 0.2);
        ScalarField u(g.size(), 3.25);
        for (double v : laplace_beltrami_apply(g, u)) CHECK(std::fabs(v) <= 1e-10);
    }
    SUBCASE("flat Fourier mode") {
        ConformalGrid g = ConformalGrid::torus(n, n, L, L);
        ScalarField u(g.size());
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) u[g.index(i, j)] = std::sin(2.0 * pi * g.x(i) / L);
        const ScalarField lap = laplace_beltrami_apply(g, u);
        const double continuum = -std::pow(2.0 * pi / L, 2);
        // exact discrete symbol of the 5-point stencil
        const double discrete = -4.0 / (g.hx * g.hx) * std::pow(std::sin(pi * g.hx / L), 2);
        for (int k = 0; k < g.size(); ++k) {
            CHECK(lap[k] == doctest::Approx(discrete * u[k]).epsilon(1e-11));
            CHECK(std::fabs(lap[k] - continuum * u[k]) <=
                  std::fabs(continuum) * (pi * g.hx / L) * (pi * g.hx / L));
        }
    }
    SUBCASE("conformal factor scales the flat mode pointwise") {
        const double eps = 0.15;
        ConformalGrid g = ConformalGrid::torus(n, n, L, L);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                g.phi[g.index(i, j)] = eps * std::sin(2.0 * pi * g.y(j) / L);
        ScalarField u(g.size());
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) u[g.index(i, j)] = std::sin(2.0 * pi * g.x(i) / L);
        const ScalarField lap = laplace_beltrami_apply(g, u);
        const double k2 = std::pow(2.0 * pi / L, 2);
        double worst = 0.0;
        for (int k = 0; k < g.size(); ++k)
            worst = std::max(worst,
                             std::fabs(lap[k] + std::exp(-2.0 * g.phi[k]) * k2 * u[k]));
        CHECK(worst <= k2 * (pi * g.hx / L) * (pi * g.hx / L) * 1.5);  // O(h^2)
    }
}

TEST_CASE("dirichlet energy") {
    SUBCASE("first square mode Rayleigh quotient") {
        for (int nodes : {33, 65}) {
            ConformalGrid g = ConformalGrid::rectangle(nodes, nodes, 1.0, 1.0);
            ScalarField u(g.size(), 0.0);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    u[g.index(i, j)] = std::sin(pi * g.x(i)) * std::sin(pi * g.y(j));
            const ScalarField w = volume_weights(g);
            double mass = 0.0;
            for (int k = 0; k < g.size(); ++k) mass += u[k] * u[k] * w[k];
            const double rq = dirichlet_energy(g, u, u) / mass;
            // the sampled sine is the exact eigenvector of the 5-point stencil
            const double h = g.hx;
            const double discrete = 8.0 / (h * h) * std::pow(std::sin(pi * h / 2.0), 2);
            CHECK(rq == doctest::Approx(discrete).epsilon(1e-11));
            CHECK(std::fabs(rq - 2.0 * pi * pi) <= 2.0 * pi * pi * (pi * h) * (pi * h) / 6.0);
        }
    }
    SUBCASE("constants carry no energy") {
        ConformalGrid g = sinx_torus(24, 1.0, 0.3);
        ScalarField u(g.size(), 1.0);
        ScalarField v = oracles::random_field(g.size(), 7u);
        CHECK(std::fabs(dirichlet_energy(g, u, v)) <= 1e-12);
    }
    SUBCASE("independent of constant conformal shifts") {
        ConformalGrid g = sinx_torus(24, 1.0, 0.3);
        ScalarField u = oracles::random_field(g.size(), 11u);
        ScalarField v = oracles::random_field(g.size(), 13u);
        const double before = dirichlet_energy(g, u, v);
        for (auto& p : g.phi) p += 1.1;
        CHECK(dirichlet_energy(g, u, v) == before);
    }
}

TEST_CASE("green identity is summation-by-parts exact") {
    SUBCASE("torus") {
        ConformalGrid g = sinx_torus(32, 1.0, 0.25);
        const ScalarField w = volume_weights(g);
        ScalarField u = oracles::random_field(g.size(), 21u);
        ScalarField v = oracles::random_field(g.size(), 22u);
        const ScalarField lap = laplace_beltrami_apply(g, u);
        double pairing = 0.0;
        for (int k = 0; k < g.size(); ++k) pairing += lap[k] * v[k] * w[k];
        const double energy = dirichlet_energy(g, u, v);
        const double scale = std::max({1.0, dirichlet_energy(g, u, u), dirichlet_energy(g, v, v)});
        CHECK(std::fabs(energy + pairing) <= 1e-10 * scale);
    }
    SUBCASE("dirichlet rectangle") {
        ConformalGrid g = ConformalGrid::rectangle(24, 28, 1.0, 1.3);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                g.phi[g.index(i, j)] = 0.2 * std::sin(pi * g.x(i)) * g.y(j);
        ScalarField u = oracles::random_field(g.size(), 31u);
        ScalarField v = oracles::random_field(g.size(), 32u);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (g.on_ring(i, j)) {
                    u[g.index(i, j)] = 0.0;
                    v[g.index(i, j)] = 0.0;
                }
        const ScalarField w = volume_weights(g);
        const ScalarField lap = laplace_beltrami_apply(g, u);
        double pairing = 0.0;
        for (int k = 0; k < g.size(); ++k) pairing += lap[k] * v[k] * w[k];
        const double energy = dirichlet_energy(g, u, v);
        const double scale = std::max({1.0, dirichlet_energy(g, u, u), dirichlet_energy(g, v, v)});
        CHECK(std::fabs(energy + pairing) <= 1e-10 * scale);
    }
}

TEST_CASE("grid invariants are enforced") {
    CHECK_THROWS_AS(ConformalGrid::torus(4, 16, 1.0, 1.0), InvalidGrid);
    ConformalGrid g = ConformalGrid::torus(16, 16, 1.0, 1.0);
    g.phi[3] = 51.0;
    CHECK_THROWS_AS(g.validate(), InvalidGrid);
    g.phi[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(g.validate(), InvalidGrid);

    ConformalGrid rect = ConformalGrid::rectangle(16, 16, 1.0, 1.0);
    DomainMask bad = DomainMask::full(rect);
    bad.interior[rect.index(0, 5)] = 1;  // ring node marked interior
    CHECK_THROWS_AS(bad.validate(rect), InvalidGrid);
    CHECK_THROWS_AS(DomainMask::centered_fraction(rect, 0.0), InvalidGrid);
}
