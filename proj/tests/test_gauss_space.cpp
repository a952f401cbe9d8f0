#include "bslab/experiments.hpp"
#include "bslab/quadrature.hpp"
#include "bslab/smooth.hpp"
#include "bslab/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace bslab;

namespace {
const double kMass = std::sqrt(2.0 * M_PI / M_E);  // closed-form Gaussian mass of the measure
GridPtr grid64() {
    static GridPtr g = make_grid(64, 64, 32);
    return g;
}
}  // namespace

TEST_CASE("quadrature reproduces the closed-form mass") {
    for (std::size_t n : {32, 48, 64}) {
        GridPtr g = make_grid(n, n, 16);
        GridFunction one = GridFunction::from_function(g, [](double, double, double) { return 1.0; });
        CHECK(std::fabs(inner_product(one, one) - kMass) / kMass < 1e-10);
    }
}

TEST_CASE("quadrature is polynomially exact") {
    GridPtr g = make_grid(16, 16, 8);
    // Moments of the one-dimensional factor exp(-y^2/4): m2 = 2, m4 = 12, m6 = 120.
    auto moment = [&](int j, int k) {
        GridFunction f = GridFunction::from_function(g, [=](double y1, double y2, double) {
            return std::pow(y1, j) * std::pow(y2, k);
        });
        GridFunction one = GridFunction::from_function(g, [](double, double, double) { return 1.0; });
        return inner_product(f, one) / kMass;
    };
    CHECK(moment(2, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(moment(4, 0) == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(moment(6, 0) == doctest::Approx(120.0).epsilon(1e-12));
    CHECK(moment(2, 2) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(std::fabs(moment(3, 0)) < 1e-12);
    CHECK(std::fabs(moment(5, 2)) < 1e-12);
}

TEST_CASE("inner products match the hand-computed normalizations") {
    GridPtr g = grid64();
    GridFunction y1 = GridFunction::from_function(g, [](double a, double, double) { return a; });
    GridFunction y2 = GridFunction::from_function(g, [](double, double b, double) { return b; });

    // <y1, y2> = 0 by odd symmetry.
    CHECK(std::fabs(inner_product(y1, y2)) < 1e-14);
    // <y1, y1> = 2 * mass; the fourth root of this squared norm is (8 pi / e)^(1/4).
    const double n2 = inner_product(y1, y1);
    CHECK(n2 == doctest::Approx(2.0 * kMass).epsilon(1e-12));
    CHECK(std::sqrt(n2) == doctest::Approx(std::pow(8.0 * M_PI / M_E, 0.25)).epsilon(1e-12));
}

TEST_CASE("inner product rejects grid mismatch") {
    GridPtr a = make_grid(16, 16, 8), b = make_grid(16, 16, 8);
    GridFunction fa(a), fb(b);
    CHECK_THROWS_AS(inner_product(fa, fb), std::invalid_argument);
}

TEST_CASE("drift Laplacian eigenfunctions") {
    GridPtr g = grid64();
    GridFunction one = GridFunction::from_function(g, [](double, double, double) { return 1.0; });
    GridFunction q2 = GridFunction::from_function(g, [](double a, double, double) { return a * a - 2.0; });
    GridFunction ct = GridFunction::from_function(g, [](double, double, double t) { return std::cos(t); });

    CHECK(norm(apply_ou(one) - one) / norm(one) < 1e-12);
    CHECK(norm(apply_ou(q2)) / norm(q2) < 1e-12);
    CHECK(norm(apply_ou(ct) - ct * 0.5) / norm(ct) < 1e-12);

    SUBCASE("rejects too-coarse grids") {
        GridPtr tiny = make_grid(4, 4, 4);
        GridFunction f(tiny);
        CHECK_THROWS_AS(apply_ou(f), std::invalid_argument);
    }
}

TEST_CASE("every listed eigenfunction has small residual under both operators") {
    GridPtr g = grid64();
    const auto& basis = spectral_basis(g);
    auto check_family = [&](const std::vector<Eigenfunction>& fam, bool shifted) {
        for (const auto& e : fam) {
            const double ev = e.eigenvalue - (shifted ? 0.5 : 0.0);
            const double res = norm(apply_ou(e.phi, shifted) - e.phi * ev) / norm(e.phi);
            CAPTURE(e.label);
            CHECK(res < 1e-6);
        }
    };
    check_family(basis.unstable(), false);
    check_family(basis.neutral(), false);
    check_family(basis.unstable_shifted(), true);
    check_family(basis.neutral_shifted(), true);
    CHECK(basis.max_cross_correlation() < 1e-8);
}

TEST_CASE("projections decompose and are idempotent") {
    GridPtr g = grid64();
    GridFunction f = random_smooth_field(g, 901);

    const GridFunction pu = project(f, Mode::Unstable);
    const GridFunction pn = project(f, Mode::Neutral);
    const GridFunction ps = project(f, Mode::Stable);
    CHECK(norm(pu + pn + ps - f) < 1e-12 * std::max(1.0, norm(f)));
    CHECK(norm(project(pu, Mode::Unstable) - pu) < 1e-10 * std::max(1.0, norm(pu)));
    CHECK(norm(project(pn, Mode::Unstable)) < 1e-10 * std::max(1.0, norm(pn)));

    SUBCASE("p+ annihilates neutral eigenfunctions") {
        GridFunction q = GridFunction::from_function(g, [](double a, double, double) { return a * a - 2.0; });
        CHECK(norm(project(q, Mode::Unstable)) < 1e-10 * norm(q));
    }
    SUBCASE("shifted operator keeps y1 neutral") {
        GridFunction y1 = GridFunction::from_function(g, [](double a, double, double) { return a; });
        CHECK(norm(project(y1, Mode::Neutral, OpKind::Lprime) - y1) < 1e-10 * norm(y1));
    }
    SUBCASE("3 + y2^2 splits as 5 * 1 + (y2^2 - 2)") {
        GridFunction f2 = GridFunction::from_function(g, [](double, double b, double) { return 3.0 + b * b; });
        GridFunction five = GridFunction::from_function(g, [](double, double, double) { return 5.0; });
        GridFunction q2 = GridFunction::from_function(g, [](double, double b, double) { return b * b - 2.0; });
        CHECK(norm(project(f2, Mode::Unstable) - five) < 1e-10);
        CHECK(norm(project(f2, Mode::Neutral) - q2) < 1e-10);
    }
}

TEST_CASE("parseval inequality on the explicit span") {
    GridPtr g = grid64();
    for (std::uint64_t s : {1u, 2u, 3u, 4u}) {
        GridFunction f = random_smooth_field(g, s);
        const double total = norm_sq(f);
        const double parts = norm_sq(project(f, Mode::Unstable)) + norm_sq(project(f, Mode::Neutral));
        CHECK(parts <= total * (1.0 + 1e-12));
    }
    // Equality iff the stable part vanishes.
    GridFunction span = GridFunction::from_function(g, [](double a, double b, double t) {
        return 2.0 - a + 0.5 * b + std::sin(t) + 0.25 * (a * a - 2.0);
    });
    const double total = norm_sq(span);
    const double parts = norm_sq(project(span, Mode::Unstable)) + norm_sq(project(span, Mode::Neutral));
    CHECK(parts == doctest::Approx(total).epsilon(1e-10));
    CHECK(norm(project(span, Mode::Stable)) < 1e-6);
}

TEST_CASE("self-adjointness and the commutator identity") {
    GridPtr g = grid64();
    double worst_sa = 0.0, worst_comm = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        GridFunction f = random_smooth_field(g, 100 + s);
        GridFunction h = random_smooth_field(g, 200 + s);
        worst_sa = std::max(worst_sa,
                            std::fabs(inner_product(apply_ou(f), h) - inner_product(f, apply_ou(h))) /
                                (norm(f) * norm(h)));
        const GridFunction comm = apply_ou(d_y1(f)) - d_y1(apply_ou(f)) - d_y1(f) * 0.5;
        worst_comm = std::max(worst_comm, norm(comm) / norm(d_y1(f)));
    }
    CHECK(worst_sa < 1e-6);
    CHECK(worst_comm < 1e-5);
}

TEST_CASE("spectral coefficients pick out the quadratic modes") {
    GridPtr g = grid64();
    SUBCASE("pure y2^2 - 2") {
        GridFunction u = GridFunction::from_function(g, [](double, double b, double) { return b * b - 2.0; });
        const auto a = spectral_coefficients(u);
        CHECK(a[1] == doctest::Approx(1.0).epsilon(1e-12));
        for (int i : {0, 2, 3, 4, 5, 6}) CHECK(std::fabs(a[i]) < 1e-12);
    }
    SUBCASE("self-similar amplitude at |tau| = 100") {
        const double tau = -100.0;
        GridFunction u = GridFunction::from_function(g, [&](double, double b, double) {
            return (2.0 - b * b) / (std::sqrt(8.0) * std::fabs(tau));
        });
        const auto a = spectral_coefficients(u);
        CHECK(a[1] == doctest::Approx(-1.0 / (std::sqrt(8.0) * 100.0)).epsilon(1e-12));
    }
    SUBCASE("mixed combination with independently computed normalizers") {
        GridFunction u = GridFunction::from_function(g, [](double a, double b, double) {
            return 0.3 * (a * a - 2.0) - 0.1 * (2.0 * a * b);
        });
        const auto c = spectral_coefficients(u);
        CHECK(c[0] == doctest::Approx(0.3).epsilon(1e-12));
        CHECK(c[2] == doctest::Approx(-0.1).epsilon(1e-12));
        for (int i : {1, 3, 4, 5, 6}) CHECK(std::fabs(c[i]) < 1e-12);
        // Normalizers against 1-D moment arithmetic: |y^2-2|^2 = 8 mass, |2 y1 y2|^2 = 16 mass.
        GridFunction q1 = GridFunction::from_function(g, [](double a, double, double) { return a * a - 2.0; });
        GridFunction cr = GridFunction::from_function(g, [](double a, double b, double) { return 2.0 * a * b; });
        CHECK(norm_sq(q1) == doctest::Approx(8.0 * kMass).epsilon(1e-12));
        CHECK(norm_sq(cr) == doctest::Approx(16.0 * kMass).epsilon(1e-12));
    }
}

TEST_CASE("cutoff truncation") {
    GridPtr g = grid64();
    GridFunction one = GridFunction::from_function(g, [](double, double, double) { return 1.0; });
    const double radius = 5.0;
    GridFunction cut = cutoff_truncate(one, radius);
    const auto& q = *g;
    for (std::size_t i = 0; i < q.n1(); ++i)
        for (std::size_t j = 0; j < q.n2(); ++j) {
            const double r = std::hypot(q.nodes_y1()[i], q.nodes_y2()[j]);
            const double v = cut(i, j, 0);
            if (r <= radius) CHECK(v == doctest::Approx(1.0));
            if (r >= 2.0 * radius) CHECK(v == 0.0);
        }
    // chi at ratio 1.5 is the smoothstep midpoint.
    CHECK(chi_cutoff(1.5) == doctest::Approx(0.5).epsilon(1e-14));
    GridFunction y1 = GridFunction::from_function(g, [](double a, double, double) { return a; });
    GridFunction cut2 = cutoff_truncate(y1, 5.0);
    for (std::size_t i = 0; i < q.n1(); ++i)
        for (std::size_t j = 0; j < q.n2(); ++j) {
            const double r = std::hypot(q.nodes_y1()[i], q.nodes_y2()[j]);
            if (std::fabs(r - 7.5) < 1e-9)
                CHECK(cut2(i, j, 0) == doctest::Approx(q.nodes_y1()[i] * 0.5));
        }
    CHECK_THROWS_AS(cutoff_truncate(one, -1.0), std::invalid_argument);
}

TEST_CASE("grid function csv round trip") {
    GridPtr g = make_grid(8, 8, 4);
    GridFunction f = random_smooth_field(g, 5);
    std::ostringstream os;
    f.write_csv(os);
    std::istringstream is(os.str());
    GridFunction back = GridFunction::read_csv(g, is);
    CHECK(norm(back - f) == 0.0);
    CHECK(os.str().rfind("y1,y2,theta,value\n", 0) == 0);
}
