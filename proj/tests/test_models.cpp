#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rsl/models.hpp"

using namespace rsl;

TEST_CASE("maximal existence times") {
    CHECK(ModelGeometry::round_sphere(2, 1.0).maximal_time() == doctest::Approx(0.5));
    CHECK(ModelGeometry::round_sphere(3, 1.0).maximal_time() == doctest::Approx(0.25));
    CHECK(std::isinf(ModelGeometry::flat_torus(1.0, 1.0).maximal_time()));
    CHECK(std::isinf(ModelGeometry::hyperbolic_scaled(1.0).maximal_time()));
    CHECK(ModelGeometry::sphere_circle_product(1.0, 1.0).maximal_time() == doctest::Approx(0.5));
}

TEST_CASE("scalar curvature closed forms") {
    CHECK(ModelGeometry::round_sphere(2, 1.0).scalar_curvature(0.0) == doctest::Approx(2.0));
    CHECK(ModelGeometry::round_sphere(3, 1.0).scalar_curvature(0.0) == doctest::Approx(6.0));
    CHECK(ModelGeometry::hyperbolic_scaled(1.0).scalar_curvature(0.5) == doctest::Approx(-1.0));
    CHECK(ModelGeometry::flat_torus(2.0, 3.0).scalar_curvature(5.0) == 0.0);
    CHECK(ModelGeometry::sphere_circle_product(1.0, 1.0).scalar_curvature(0.0) ==
          doctest::Approx(2.0));

    CHECK_THROWS_AS(ModelGeometry::round_sphere(2, 1.0).scalar_curvature(0.5), TimeOutOfRange);
    CHECK_THROWS_AS(ModelGeometry::round_sphere(2, 1.0).scalar_curvature(-0.1), TimeOutOfRange);
}

TEST_CASE("einstein bounds") {
    const EinsteinBounds s3 = ModelGeometry::round_sphere(3, 1.0).einstein_bounds(0.0);
    CHECK(s3.lambda_min == doctest::Approx(-1.0));
    CHECK(s3.lambda_max == doctest::Approx(-1.0));

    const EinsteinBounds s2 = ModelGeometry::round_sphere(2, 0.8).einstein_bounds(0.1);
    CHECK(s2.lambda_min == 0.0);
    CHECK(s2.lambda_max == 0.0);

    const EinsteinBounds prod = ModelGeometry::sphere_circle_product(1.0, 1.0).einstein_bounds(0.0);
    CHECK(prod.lambda_min == doctest::Approx(-1.0));
    CHECK(prod.lambda_max == 0.0);
}

TEST_CASE("eigenvalue ladders") {
    SUBCASE("round spheres") {
        CHECK(ModelGeometry::round_sphere(2, 1.0).eigenvalue(1, 0.25) == doctest::Approx(4.0));
        CHECK(ModelGeometry::round_sphere(3, 1.0).eigenvalue(1, 0.0) == doctest::Approx(3.0));
        CHECK(ModelGeometry::round_sphere(2, 1.0).eigenvalue(2, 0.0) == doctest::Approx(6.0));
    }
    SUBCASE("product: the pure circle mode is static") {
        const ModelGeometry m = ModelGeometry::sphere_circle_product(1.0, 1.0);
        CHECK(m.product_mode(1) == std::pair{0, 1});
        for (double t : {0.0, 0.2, 0.4}) CHECK(m.eigenvalue(1, t) == doctest::Approx(1.0));
        CHECK(m.product_mode(2) == std::pair{1, 0});
        CHECK(m.eigenvalue(2, 0.25) == doctest::Approx(2.0 / 0.5));
    }
    SUBCASE("hyperbolic scaling of a supplied spectrum") {
        const ModelGeometry m = ModelGeometry::hyperbolic_scaled(1.0, {2.0, 3.7});
        CHECK(m.eigenvalue(1, 0.0) == doctest::Approx(2.0));
        CHECK(m.eigenvalue(1, 0.5) == doctest::Approx(2.0 / 2.0));
        CHECK(m.eigenvalue(2, 1.5) == doctest::Approx(3.7 / 4.0));
        CHECK_THROWS_AS(ModelGeometry::hyperbolic_scaled(1.0).eigenvalue(1, 0.0),
                        UnknownSpectrum);
    }
    SUBCASE("flat torus lattice") {
        const ModelGeometry m = ModelGeometry::flat_torus(1.0, 1.0);
        const double four_pi2 = 4.0 * std::acos(-1.0) * std::acos(-1.0);
        CHECK(m.eigenvalue(1, 0.0) == doctest::Approx(four_pi2));
        CHECK(m.eigenvalue(2, 3.0) == doctest::Approx(2.0 * four_pi2));  // (1,1)
        CHECK(m.eigenvalue(3, 0.0) == doctest::Approx(4.0 * four_pi2));  // (2,0)
    }
    SUBCASE("invalid modes") {
        CHECK_THROWS_AS(ModelGeometry::round_sphere(2, 1.0).eigenvalue(0, 0.0), Error);
    }
}

TEST_CASE("rate predictions match finite differences of the ladder") {
    SUBCASE("frozen spot values") {
        CHECK(ModelGeometry::round_sphere(2, 1.0).rate_prediction(1, 0.0) == doctest::Approx(4.0));
        CHECK(ModelGeometry::flat_torus(1.0, 2.0).rate_prediction(3, 1.0) == 0.0);
        // equality case of the monotonicity hypothesis: exact zero
        CHECK(ModelGeometry::sphere_circle_product(1.0, 1.0).rate_prediction(1, 0.0) == 0.0);
    }
    SUBCASE("second-order error decay of the central difference") {
        struct Probe {
            ModelGeometry model;
            double t;
        };
        const Probe probes[] = {
            {ModelGeometry::round_sphere(2, 1.0), 0.1},
            {ModelGeometry::round_sphere(3, 1.2), 0.05},
            {ModelGeometry::hyperbolic_scaled(1.0, {1.5, 2.5, 4.0}), 0.3},
            {ModelGeometry::sphere_circle_product(1.0, 1.0), 0.1},
        };
        for (const auto& probe : probes) {
            for (int mode = 1; mode <= 3; ++mode) {
                auto lam = [&](double t) { return probe.model.eigenvalue(mode, t); };
                const double rate = probe.model.rate_prediction(mode, probe.t);
                const double e1 = std::fabs(oracles::central_diff(lam, probe.t, 1e-3) - rate);
                const double e2 = std::fabs(oracles::central_diff(lam, probe.t, 5e-4) - rate);
                if (e1 < 1e-12) {
                    CHECK(e2 < 1e-12);  // static branch (circle modes, torus)
                } else {
                    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
                }
            }
        }
    }
}

TEST_CASE("main theorem feasibility oracle") {
    SUBCASE("sphere n=3 admits a = 1 with R = 6 >= 2") {
        const ModelGeometry m = ModelGeometry::round_sphere(3, 1.0);
        const double a_req = -m.einstein_bounds(0.0).lambda_min;
        CHECK(a_req == doctest::Approx(1.0));
        CHECK(m.scalar_curvature(0.0) >= 2.0 * a_req);
        double prev = 0.0;
        for (double t : {0.0, 0.05, 0.1, 0.15, 0.2}) {
            const double lam = m.eigenvalue(1, t);
            CHECK(lam >= prev);
            prev = lam;
        }
    }
    SUBCASE("product sits exactly on the boundary R = 2a") {
        const ModelGeometry m = ModelGeometry::sphere_circle_product(1.0, 1.0);
        for (double t : {0.0, 0.1, 0.2, 0.3}) {
            const double a_req = -m.einstein_bounds(t).lambda_min;
            CHECK(m.scalar_curvature(t) == doctest::Approx(2.0 * a_req).epsilon(1e-14));
        }
    }
}

TEST_CASE("hyperbolic family satisfies the exponential upper bound exactly") {
    const ModelGeometry m = ModelGeometry::hyperbolic_scaled(1.0, {1.0});
    const double c_bound = 2.0 / (1.0 + 2.0 * 1.0);  // inf |R| over [0, 1]
    for (int i = 0; i <= 50; ++i) {
        const double t = i / 50.0;
        const double lam = m.eigenvalue(1, t);
        const double bound = m.eigenvalue(1, 0.0) * std::exp(-c_bound * t);
        CHECK(lam <= bound * (1.0 + 1e-12));
    }
}

TEST_CASE("scale covariance: lengths by s, eigenvalues by 1/s^2 at time s^2 t") {
    const double s = 2.0, s2 = s * s;
    SUBCASE("sphere") {
        const ModelGeometry base = ModelGeometry::round_sphere(3, 1.0);
        const ModelGeometry scaled = ModelGeometry::round_sphere(3, s);
        for (double t : {0.0, 0.1, 0.2}) {
            CHECK(scaled.eigenvalue(2, s2 * t) ==
                  doctest::Approx(base.eigenvalue(2, t) / s2).epsilon(1e-13));
            CHECK(scaled.scalar_curvature(s2 * t) ==
                  doctest::Approx(base.scalar_curvature(t) / s2).epsilon(1e-13));
        }
    }
    SUBCASE("hyperbolic (scale is quadratic in length)") {
        const ModelGeometry base = ModelGeometry::hyperbolic_scaled(1.0, {2.0});
        const ModelGeometry scaled = ModelGeometry::hyperbolic_scaled(s2, {2.0 / s2});
        for (double t : {0.0, 0.4, 1.0}) {
            CHECK(scaled.eigenvalue(1, s2 * t) ==
                  doctest::Approx(base.eigenvalue(1, t) / s2).epsilon(1e-13));
            CHECK(scaled.scalar_curvature(s2 * t) ==
                  doctest::Approx(base.scalar_curvature(t) / s2).epsilon(1e-13));
        }
    }
    SUBCASE("torus and product") {
        const ModelGeometry torus = ModelGeometry::flat_torus(1.0, 1.5);
        const ModelGeometry torus_scaled = ModelGeometry::flat_torus(s, 1.5 * s);
        CHECK(torus_scaled.eigenvalue(4, 0.0) ==
              doctest::Approx(torus.eigenvalue(4, 0.0) / s2).epsilon(1e-13));
        const ModelGeometry prod = ModelGeometry::sphere_circle_product(1.0, 1.0);
        const ModelGeometry prod_scaled = ModelGeometry::sphere_circle_product(s, s);
        for (int mode : {1, 2, 3})
            CHECK(prod_scaled.eigenvalue(mode, s2 * 0.1) ==
                  doctest::Approx(prod.eigenvalue(mode, 0.1) / s2).epsilon(1e-13));
    }
}

TEST_CASE("advanced_to re-bases the flow consistently") {
    const ModelGeometry sphere = ModelGeometry::round_sphere(2, 1.0);
    const ModelGeometry later = sphere.advanced_to(0.25);
    CHECK(later.sphere_radius_sq(0.0) == doctest::Approx(0.5));
    CHECK(later.eigenvalue(1, 0.1) == doctest::Approx(sphere.eigenvalue(1, 0.35)).epsilon(1e-13));

    const ModelGeometry hyp = ModelGeometry::hyperbolic_scaled(1.0, {3.0});
    const ModelGeometry hyp_later = hyp.advanced_to(0.5);
    CHECK(hyp_later.eigenvalue(1, 0.25) == doctest::Approx(hyp.eigenvalue(1, 0.75)).epsilon(1e-13));

    const ModelGeometry prod = ModelGeometry::sphere_circle_product(1.0, 1.0);
    const ModelGeometry prod_later = prod.advanced_to(0.25);
    CHECK(prod_later.sphere_radius_sq(0.0) == doctest::Approx(0.5));
    CHECK(prod_later.circle_radius() == doctest::Approx(1.0));
}
