#include "bslab/model_surface.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>

using namespace bslab;

TEST_CASE("exact cylinder identities") {
    const ModelSurface cyl = ModelSurface::exact_cylinder();
    SUBCASE("t = -8: radius 4, H = 1/4, |A|^2 = 1/16, nu1 = 0") {
        const auto g = cyl.geometry(1.3, -0.4, 0.9, -8.0);
        CHECK(g.mean_curvature == doctest::Approx(0.25));
        CHECK(g.second_fund_sq == doctest::Approx(1.0 / 16.0));
        CHECK(g.nu1 == 0.0);
        CHECK(g.nu2 == 0.0);
        CHECK(std::hypot(g.position[2], g.position[3]) == doctest::Approx(4.0));
    }
    SUBCASE("coordinate Laplacians: flat directions vanish, ring obeys -H nu") {
        const auto g = cyl.geometry(0.0, 0.0, 0.3, -2.0);
        CHECK(g.laplace_x[0] == 0.0);
        CHECK(g.laplace_x[1] == 0.0);
        CHECK(g.laplace_x[2] ==
              doctest::Approx(-g.mean_curvature * g.normal[2]).epsilon(1e-12));
        CHECK(g.laplace_x[3] ==
              doctest::Approx(-g.mean_curvature * g.normal[3]).epsilon(1e-12));
    }
    SUBCASE("rejects nonnegative times") {
        CHECK_THROWS_AS(cyl.geometry(0, 0, 0, 0.5), std::invalid_argument);
    }
}

TEST_CASE("zero graph matches the exact cylinder to 1e-8") {
    const ModelSurface cyl = ModelSurface::exact_cylinder();
    const ModelSurface graph =
        ModelSurface::graph_over_cylinder([](double, double, double, double) { return 0.0; });
    for (double t : {-1.0, -8.0, -1e4}) {
        const auto a = cyl.geometry(0.7, -0.2, 1.1, t);
        const auto b = graph.geometry(0.7, -0.2, 1.1, t);
        CHECK(std::fabs(a.mean_curvature - b.mean_curvature) < 1e-8);
        CHECK(std::fabs(a.second_fund_sq - b.second_fund_sq) < 1e-8);
        for (int i = 0; i < 4; ++i) {
            CHECK(std::fabs(a.normal[i] - b.normal[i]) < 1e-8);
            CHECK(std::fabs(a.position[i] - b.position[i]) < 1e-8);
        }
    }
}

TEST_CASE("tilted graph has the first-variation normal") {
    // Renormalized offset u = c y1: the unrescaled radius is sqrt(2|t|) + c x1,
    // a cone-like tilt with nu1 = -c/sqrt(1 + c^2).
    const double c = 0.01;
    const ModelSurface tilted = ModelSurface::graph_over_cylinder(
        [c](double y1, double, double, double) { return c * y1; });
    const auto g = tilted.geometry(0.5, 1.0, 0.7, -4.0);
    CHECK(g.nu1 == doctest::Approx(-c / std::sqrt(1.0 + c * c)).epsilon(1e-7));
    // Normal is unit and radially outward.
    double n2 = 0.0;
    for (double v : g.normal) n2 += v * v;
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(g.normal[2] * std::cos(0.7) + g.normal[3] * std::sin(0.7) > 0.0);
}

TEST_CASE("laplace-beltrami of ambient coordinates reproduces the mean curvature vector") {
    const ModelSurface graph = ModelSurface::graph_over_cylinder(
        [](double y1, double y2, double, double) { return 0.02 * y1 + 0.01 * y2 * y2 * std::exp(-0.1 * y2 * y2); });
    const double t = -9.0;
    const auto g = graph.geometry(0.4, 0.8, 1.9, t);
    for (int i = 0; i < 4; ++i) {
        auto coord = [i](const std::array<double, 4>& x) { return x[i]; };
        const double lap = graph.laplace_beltrami(0.4, 0.8, 1.9, t, coord);
        CHECK(lap == doctest::Approx(-g.mean_curvature * g.normal[i]).epsilon(5e-6));
    }
}

TEST_CASE("surface Laplacian of x1^2 on the cylinder") {
    // Delta(x1^2) = 2 |grad x1|^2 = 2 on the exact cylinder.
    const ModelSurface cyl = ModelSurface::exact_cylinder();
    auto f = [](const std::array<double, 4>& x) { return x[0] * x[0]; };
    const double lap = cyl.laplace_beltrami(2.0, -1.0, 0.4, -25.0, f);
    CHECK(lap == doctest::Approx(2.0).epsilon(1e-8));
}
