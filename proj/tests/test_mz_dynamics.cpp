#include "bslab/mz.hpp"
#include "bslab/ode_solve.hpp"
#include "bslab/random_fields.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace bslab;

TEST_CASE("decoupled U-system has pure exponential modes") {
    MZEnvelope env;  // defaults: c0 = 1, gamma = 1/2, tau_star = -60
    const auto zero = CoefficientRealization::zeros();

    SUBCASE("unstable seed grows like e^(tau - tau0)") {
        const Trajectory t = integrate_u_system(env, zero, {1.0, 0.0, 0.0}, -100.0, -60.0, 201);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double expected = std::exp(t.times[i] + 100.0);
            CHECK(t.states[i][0] == doctest::Approx(expected).epsilon(1e-8));
            CHECK(t.states[i][1] == 0.0);
            CHECK(t.states[i][2] == 0.0);
        }
        CHECK(verify_mz_trichotomy(t, env).verdict == MZVerdict::UnstableDominates);
    }
    SUBCASE("stable seed grows backward in tau") {
        const Trajectory t = integrate_u_system(env, zero, {0.0, 0.0, 1.0}, -60.0, -100.0, 201);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double expected = std::exp(-(t.times[i] + 60.0));
            CHECK(t.states[i][2] == doctest::Approx(expected).epsilon(1e-8));
        }
    }
}

TEST_CASE("engineered stable-dominated state is flagged as violation") {
    MZEnvelope env;
    const auto zero = CoefficientRealization::zeros();
    // Reversed integration from a final state with U- >> U0 + U+ produces a
    // trajectory no admissible forward dynamics can generate.
    const Trajectory t = integrate_u_system(env, zero, {1e-6, 1e-6, 1.0}, -60.0, -100.0, 201);
    const auto rep = verify_mz_trichotomy(t, env);
    CHECK(rep.verdict == MZVerdict::Violation);
    CHECK_FALSE(rep.stable_bound_ok);
}

TEST_CASE("monte-carlo admissible realizations never violate the trichotomy") {
    MZEnvelope env;
    std::size_t violations = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const std::uint64_t seed = Rng::derive_seed(42, k);
        Rng rng(seed);
        const double up0 = std::pow(10.0, rng.uniform(-6.0, 0.0));
        const double u00 = std::pow(10.0, rng.uniform(-6.0, 0.0));
        const double um0 = rng.uniform(0.0, 0.9) * 2.0 * env.epsilon(-100.0) * (up0 + u00);
        const auto realization = CoefficientRealization::random(Rng::derive_seed(seed, 1));
        const Trajectory t =
            integrate_u_system(env, realization, {up0, u00, um0}, -100.0, -60.0, 400);
        const auto rep = verify_mz_trichotomy(t, env);
        if (rep.verdict == MZVerdict::Violation || rep.verdict == MZVerdict::Inconclusive)
            ++violations;
        CHECK(rep.f_monotone_ok);
        CHECK(rep.stable_bound_ok);
    }
    CHECK(violations == 0);
}

TEST_CASE("coefficient realizations stay strictly inside the envelope band") {
    for (std::uint64_t seed : {1u, 9u, 77u}) {
        const auto r = CoefficientRealization::random(seed);
        for (double tau = -200.0; tau < -20.0; tau += 0.37) {
            CHECK(std::fabs(r.c_plus(tau)) < 1.0);
            CHECK(std::fabs(r.c_zero(tau)) < 1.0);
            CHECK(std::fabs(r.c_minus(tau)) < 1.0);
        }
    }
}

TEST_CASE("trichotomy checker reports short trajectories as inconclusive") {
    MZEnvelope env;
    const auto zero = CoefficientRealization::zeros();
    const Trajectory t = integrate_u_system(env, zero, {1.0, 1.0, 0.0}, -62.0, -61.0, 10);
    CHECK(verify_mz_trichotomy(t, env).verdict == MZVerdict::Inconclusive);
}

TEST_CASE("alpha system follows the self-similar branch") {
    MZEnvelope env;
    env.tau_star = -50.0;
    const auto zero = CoefficientRealization::zeros();
    const double sqrt8 = std::sqrt(8.0);

    SUBCASE("zero data stays zero") {
        const Trajectory t = integrate_alpha(env, zero, {0.0, 0.0, 0.0}, -100.0, -50.0, 101);
        for (const auto& s : t.states)
            CHECK(std::fabs(s[0]) + std::fabs(s[1]) + std::fabs(s[2]) == 0.0);
    }
    SUBCASE("alpha2 = -1/(sqrt8 |tau|) is invariant") {
        const double tau0 = -100.0;
        const Trajectory t =
            integrate_alpha(env, zero, {0.0, -1.0 / (sqrt8 * 100.0), 0.0}, tau0, -50.0, 101);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double expected = -1.0 / (sqrt8 * std::fabs(t.times[i]));
            CHECK(t.states[i][1] == doctest::Approx(expected).epsilon(1e-6));
        }
    }
    SUBCASE("finite-time blow-up is reported with its time") {
        // Positive quadratic coefficient integrated backward has a pole at
        // tau0 - 1/(sqrt8 alpha0).
        const double alpha0 = 0.1;
        const double tau0 = -50.0;
        MZEnvelope wide;
        wide.tau_star = -50.0;
        const Trajectory t = integrate_alpha(wide, zero, {0.0, alpha0, 0.0}, tau0, -60.0, 101);
        CHECK(t.blew_up);
        CHECK(t.blowup_time ==
              doctest::Approx(tau0 - 1.0 / (sqrt8 * alpha0)).epsilon(1e-2));
    }
    SUBCASE("trace derivative lies in the [S^2, 5 S^2] band in the claimed regime") {
        // The band needs the error envelope small against S^2, so sample the
        // deep regime; the derivative is evaluated pointwise from the system.
        MZEnvelope deep;
        deep.tau_star = -2e5;
        const double tau0 = -1e6;
        const auto realization = CoefficientRealization::random(99);
        const double a0 = -0.5 / std::fabs(tau0);
        const Trajectory t =
            integrate_alpha(deep, realization, {a0, a0, 0.1 * a0}, tau0, -2e5, 301);
        std::size_t tested = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const std::array<double, 3> a{t.states[i][0], t.states[i][1], t.states[i][2]};
            const double s = a[0] + a[1];
            if (!(s <= -0.25 / std::fabs(t.times[i]))) continue;
            const auto d = alpha_rhs(deep, realization, t.times[i], a);
            const double minus_ds = -(d[0] + d[1]);
            CHECK(minus_ds >= s * s * (1.0 - 1e-9));
            CHECK(minus_ds <= 5.0 * s * s);
            ++tested;
        }
        CHECK(tested > 100);
    }
}

TEST_CASE("fixed points of the dimensionless phase plane") {
    const auto fps = classify_fixed_points();
    REQUIRE(fps.size() == 3);

    CHECK(std::fabs(fps[0].x) < 1e-10);
    CHECK(std::fabs(fps[0].y) < 1e-10);
    CHECK(fps[0].eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fps[0].eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(fps[0].type == "unstable node");

    CHECK(fps[1].x == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::fabs(fps[1].y) < 1e-10);
    CHECK(fps[1].eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(fps[1].eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fps[1].type == "saddle");

    CHECK(fps[2].x == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fps[2].y == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fps[2].eigenvalues[0] == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(fps[2].eigenvalues[1] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(fps[2].type == "stable node");
}

TEST_CASE("phase-plane trajectories") {
    const auto none = XYPerturbation::none();
    SUBCASE("fixed points stay put") {
        for (auto start : {std::array<double, 2>{0.5, 0.0}, std::array<double, 2>{1.0, 1.0}}) {
            const Trajectory t = integrate_xy(start, 5.0, 25.0, none, 101);
            for (const auto& s : t.states) {
                CHECK(s[0] == doctest::Approx(start[0]).epsilon(1e-9));
                CHECK(std::fabs(s[1] - start[1]) < 1e-9);
            }
        }
    }
    SUBCASE("(0.6, 0.2) converges to the attracting node (1,1)") {
        const Trajectory t = integrate_xy({0.6, 0.2}, 5.0, 30.0, none, 101);
        CHECK(t.states.back()[0] == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(t.states.back()[1] == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("the region y <= x^2 maps into itself") {
        Rng rng(5);
        for (int k = 0; k < 20; ++k) {
            const double x0 = rng.uniform(0.3, 1.2);
            const double y0 = rng.uniform(0.0, 1.0) * x0 * x0;
            const Trajectory t = integrate_xy({x0, y0}, 5.0, 25.0, none, 201);
            for (const auto& s : t.states) CHECK(s[1] <= s[0] * s[0] + 1e-6);
        }
    }
    SUBCASE("50 perturbed trajectories respect the confinement region") {
        const double gamma = 0.8;
        const double sigma0 = std::log(1e8);
        for (std::uint64_t k = 0; k < 50; ++k) {
            Rng rng(Rng::derive_seed(7, k));
            const double x0 = rng.uniform(0.55, 0.85);
            const double y0 = rng.uniform(0.3, std::min(0.8, 0.9 * x0 * x0));
            const auto pert = XYPerturbation::random(Rng::derive_seed(7, 1000 + k), 1.0, gamma);
            const Trajectory t = integrate_xy({x0, y0}, sigma0, sigma0 + 20.0, pert, 301);
            const auto rep = check_xy_confinement(t, 1e-5, gamma, 10.0);
            CAPTURE(k);
            CHECK(rep.ok);
        }
    }
}

TEST_CASE("z-mode rotation bound") {
    SUBCASE("x = 1/2 freezes z") {
        const Trajectory t = integrate_z([](double) { return 0.5; }, [](double) { return 0.0; },
                                         0.7, 4.0, 24.0, 101);
        for (const auto& s : t.states) CHECK(s[0] == doctest::Approx(0.7).epsilon(1e-10));
    }
    SUBCASE("x = 3/4 gives exponential decay at rate 1/2") {
        const Trajectory t = integrate_z([](double) { return 0.75; }, [](double) { return 0.0; },
                                         1.0, 4.0, 24.0, 101);
        for (std::size_t i = 0; i < t.size(); ++i)
            CHECK(t.states[i][0] ==
                  doctest::Approx(std::exp(-(t.times[i] - 4.0) / 2.0)).epsilon(1e-8));
    }
    SUBCASE("matched solution equals the variation-of-constants integral") {
        // q = e^(-gamma sigma/4) with x = 1/2: the solution vanishing at
        // infinity is exactly z = -(4/gamma) e^(-gamma sigma/4).
        const double gamma = 0.4;
        const double sigma1 = 60.0;
        const double z_tail = -(4.0 / gamma) * std::exp(-gamma * sigma1 / 4.0);
        const Trajectory t = integrate_z([](double) { return 0.5; },
                                         [gamma](double s) { return std::exp(-gamma * s / 4.0); },
                                         z_tail, sigma1, 4.0, 201);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double expected = -(4.0 / gamma) * std::exp(-gamma * t.times[i] / 4.0);
            CHECK(t.states[i][0] == doctest::Approx(expected).epsilon(1e-7));
        }
        const auto rep = z_bound_report(t, gamma, 10.0 + 1e-6);
        CHECK(rep.decay_bound_ok);
        CHECK(rep.measured_c_quarter == doctest::Approx(10.0).epsilon(1e-6));
    }
}

TEST_CASE("switch time") {
    const double kappa0 = 1e-5;
    SUBCASE("zero coefficients never switch") {
        Trajectory t;
        t.system = "alpha";
        t.time_label = "tau";
        t.components = {"alpha1", "alpha2", "alpha3"};
        for (int i = 0; i <= 100; ++i) {
            t.times.push_back(-400.0 + 3.0 * i);
            t.states.push_back({0.0, 0.0, 0.0});
        }
        CHECK(switch_time(t, kappa0).never);
    }
    SUBCASE("self-similar branch switches immediately") {
        Trajectory t;
        t.system = "alpha";
        for (int i = 0; i <= 100; ++i) {
            const double tau = -400.0 + 3.0 * i;
            t.times.push_back(tau);
            t.states.push_back({0.0, -1.0 / (std::sqrt(8.0) * std::fabs(tau)), 0.0});
        }
        const auto sw = switch_time(t, kappa0);
        CHECK_FALSE(sw.never);
        CHECK(sw.tau_s == doctest::Approx(t.times.back()));
    }
    SUBCASE("synthetic ramp crosses where |alpha| |tau| = kappa0") {
        // Smallness holds near the top of the range (|alpha2| |tau| = kappa0/2
        // for tau >= -200) and ramps up to 2 kappa0 going down; the switch time
        // is the first failure scanning downward, i.e. the ramp crossing.
        auto amp = [&](double tau) {
            if (tau >= -200.0) return 0.5 * kappa0;
            const double s = (-200.0 - tau) / 100.0;  // 0 at -200, 1 at -300
            return (0.5 + 1.5 * std::min(s, 1.0)) * kappa0;
        };
        Trajectory t;
        t.system = "alpha";
        for (int i = 0; i <= 4000; ++i) {
            const double tau = -400.0 + 0.075 * i;
            t.times.push_back(tau);
            t.states.push_back({0.0, -amp(tau) / std::fabs(tau), 0.0});
        }
        double lo = -300.0, hi = -200.0;  // bisection oracle on the closed form
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (amp(mid) > kappa0)
                lo = mid;
            else
                hi = mid;
        }
        const auto sw = switch_time(t, kappa0);
        CHECK_FALSE(sw.never);
        CHECK(sw.tau_s == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-4));
    }
    SUBCASE("empty trajectory is rejected") {
        Trajectory t;
        CHECK_THROWS_AS(switch_time(t, kappa0), std::invalid_argument);
    }
}

TEST_CASE("integrator order confirmed by Richardson extrapolation") {
    // Fixed-step runs of the smooth phase-plane problem at h and h/2: the
    // error ratio approaches 2^5 for the 5th-order scheme. The reference uses
    // a step small enough to sit well below both errors.
    auto run_fixed = [&](double h) {
        OdeRhs rhs = [](double, const std::vector<double>& v, std::vector<double>& dv) {
            dv[0] = v[0] + v[1] - 2.0 * v[0] * v[0];
            dv[1] = 2.0 * v[1] - 2.0 * v[0] * v[1];
        };
        OdeOptions opts;
        opts.fixed_step = h;
        return integrate_dopri5(rhs, {0.6, 0.2}, 0.0, 2.0, 2, opts).states.back();
    };
    const auto ref = run_fixed(0.01);
    const auto c1 = run_fixed(0.4);
    const auto c2 = run_fixed(0.2);
    const double e1 = std::hypot(c1[0] - ref[0], c1[1] - ref[1]);
    const double e2 = std::hypot(c2[0] - ref[0], c2[1] - ref[1]);
    const double order = std::log2(e1 / e2);
    CHECK(order > 4.2);
    CHECK(order < 5.8);
}

TEST_CASE("trajectory csv carries the system name and components") {
    MZEnvelope env;
    const Trajectory t = integrate_u_system(env, CoefficientRealization::zeros(),
                                            {1.0, 0.5, 0.0}, -100.0, -60.0, 11);
    std::ostringstream os;
    t.write_csv(os);
    CHECK(os.str().find("tau,Uplus,Uzero,Uminus") == 0);
    CHECK(os.str().find("system=U") != std::string::npos);
}
