// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include "bslab/barrier.hpp"
#include "bslab/comparison.hpp"
#include "bslab/experiments.hpp"
#include "bslab/flow.hpp"
#include "bslab/model_surface.hpp"
#include "bslab/mz.hpp"
#include "bslab/random_fields.hpp"
#include "bslab/shrinker.hpp"
#include "bslab/spectral.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace bslab;

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt8 = 2.8284271247461903;

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<bool(std::string&)> body;
};

int run_all(const std::vector<Criterion>& criteria) {
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = secs < c.budget_seconds;
        const bool pass = ok && in_budget;
        if (!pass) ++failures;
        std::printf("[%s] %-18s %6.1fs (budget %4.0fs)%s%s\n", pass ? "PASS" : "FAIL",
                    c.name.c_str(), secs, c.budget_seconds, detail.empty() ? "" : "  ",
                    detail.c_str());
        std::fflush(stdout);
    }
    return failures;
}

// ------------------------------------------------------------ criterion 1 --

bool spectral_suite(std::string& detail) {
    GridPtr grid = make_grid(64, 64, 32);
    const auto& basis = spectral_basis(grid);

    double worst_eig = 0.0;
    auto fam = [&](const std::vector<Eigenfunction>& functions, bool shifted) {
        for (const auto& e : functions) {
            const double ev = e.eigenvalue - (shifted ? 0.5 : 0.0);
            worst_eig = std::max(worst_eig,
                                 norm(apply_ou(e.phi, shifted) - e.phi * ev) / norm(e.phi));
        }
    };
    fam(basis.unstable(), false);
    fam(basis.neutral(), false);
    fam(basis.unstable_shifted(), true);
    fam(basis.neutral_shifted(), true);

    const double worst_orth = basis.max_cross_correlation();

    double worst_comm = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const GridFunction f = random_smooth_field(grid, Rng::derive_seed(2024, k));
        const GridFunction comm = apply_ou(d_y1(f)) - d_y1(apply_ou(f)) - d_y1(f) * 0.5;
        worst_comm = std::max(worst_comm, norm(comm) / norm(d_y1(f)));
    }

    std::ostringstream ss;
    ss << "eig=" << worst_eig << " orth=" << worst_orth << " comm=" << worst_comm;
    detail = ss.str();
    return worst_eig < 1e-6 && worst_orth < 1e-8 && worst_comm < 1e-5;
}

// ------------------------------------------------------------ criterion 2 --

bool phase_plane_suite(std::string& detail) {
    const auto fps = classify_fixed_points();
    if (fps.size() != 3) {
        detail = "expected 3 fixed points";
        return false;
    }
    const double tol = 1e-8;
    bool ok = std::fabs(fps[0].x) < tol && std::fabs(fps[0].y) < tol &&
              std::fabs(fps[0].eigenvalues[0] - 1.0) < tol &&
              std::fabs(fps[0].eigenvalues[1] - 2.0) < tol;
    ok = ok && std::fabs(fps[1].x - 0.5) < tol && std::fabs(fps[1].y) < tol &&
         std::fabs(fps[1].eigenvalues[0] + 1.0) < tol &&
         std::fabs(fps[1].eigenvalues[1] - 1.0) < tol;
    ok = ok && std::fabs(fps[2].x - 1.0) < tol && std::fabs(fps[2].y - 1.0) < tol &&
         std::fabs(fps[2].eigenvalues[0] + 2.0) < tol &&
         std::fabs(fps[2].eigenvalues[1] + 1.0) < tol;
    if (!ok) {
        detail = "fixed-point data off";
        return false;
    }

    const double gamma = 0.8;
    const double sigma0 = std::log(1e8);
    std::size_t exits = 0;
    for (std::uint64_t k = 0; k < 50; ++k) {
        Rng rng(Rng::derive_seed(7, k));
        const double x0 = rng.uniform(0.55, 0.85);
        const double y0 = rng.uniform(0.3, std::min(0.8, 0.9 * x0 * x0));
        const auto pert = XYPerturbation::random(Rng::derive_seed(7, 1000 + k), 1.0, gamma);
        const Trajectory t = integrate_xy({x0, y0}, sigma0, sigma0 + 20.0, pert, 301);
        if (!check_xy_confinement(t, 1e-5, gamma, 10.0).ok) ++exits;
    }
    std::ostringstream ss;
    ss << "confinement exits=" << exits << "/50";
    detail = ss.str();
    return exits == 0;
}

// ------------------------------------------------------------ criterion 3 --

bool mz_monte_carlo(std::string& detail) {
    MZEnvelope env;  // c0 = 1, gamma = 1/2, horizon -60
    const double tau0 = -100.0;
    std::size_t bad = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const std::uint64_t seed = Rng::derive_seed(42, k);
        Rng rng(seed);
        const double up0 = std::pow(10.0, rng.uniform(-6.0, 0.0));
        const double u00 = std::pow(10.0, rng.uniform(-6.0, 0.0));
        const double um0 = rng.uniform(0.0, 0.9) * 2.0 * env.epsilon(tau0) * (up0 + u00);
        const auto realization = CoefficientRealization::random(Rng::derive_seed(seed, 1));
        const Trajectory t =
            integrate_u_system(env, realization, {up0, u00, um0}, tau0, env.tau_star, 400);
        const auto rep = verify_mz_trichotomy(t, env);
        if (rep.verdict == MZVerdict::Violation || rep.verdict == MZVerdict::Inconclusive ||
            !rep.stable_bound_ok)
            ++bad;
    }
    std::ostringstream ss;
    ss << "violations=" << bad << "/100";
    detail = ss.str();
    return bad == 0;
}

// ------------------------------------------------------------ criterion 4 --

bool shrinker_suite(std::string& detail) {
    const double L = 10.0;
    double worst_res = 0.0, worst_conc = -1e300, worst_tip = -1e300;
    for (double a : {10.0, 20.0, 50.0, 100.0}) {
        const ShrinkerProfile p = solve_shrinker(a);
        worst_res = std::max(worst_res, p.fd_residual_sup());
        worst_conc = std::max(worst_conc, p.max_vpp());
        const double lhs = p.value(L - 1.0) - kSqrt2;
        const double rhs = -((L - 1.0) * (L - 1.0) - 5.0) / (kSqrt2 * a * a);
        worst_tip = std::max(worst_tip, lhs - rhs);
    }
    std::ostringstream ss;
    ss << "res=" << worst_res << " vpp_max=" << worst_conc << " tip_slack=" << worst_tip;
    detail = ss.str();
    return worst_res < 1e-6 && worst_conc <= 1e-10 && worst_tip <= 0.0;
}

// ------------------------------------------------------------ criterion 5 --

bool barrier_suite(std::string& detail) {
    auto profile = std::make_shared<const ShrinkerProfile>(solve_shrinker(39.0));
    double worst = 1e300;
    for (double a1 : {40.0, 60.0, 120.0, 400.0}) {
        const BarrierSurface b(a1, 40.0, 10.0, profile);
        const BarrierReport rep = verify_inner_barrier(b, 120, 32);
        worst = std::min(worst, rep.min_scaled_residual);
        if (!rep.pass) {
            detail = "inequality failed at a1=" + std::to_string(a1);
            return false;
        }
    }
    // lambda-scaling closure on the round case.
    const BarrierSurface round(40.0, 40.0, 10.0, profile);
    for (double lam : {1.0, 1.5, 3.0, 10.0}) {
        if (!verify_inner_barrier(round, 80, 24, lam).pass) {
            detail = "scaling closure failed at lambda=" + std::to_string(lam);
            return false;
        }
    }
    // Corrupted-profile negative control must fail.
    auto bad = std::make_shared<const ShrinkerProfile>(profile->scaled(0.5));
    const BarrierSurface corrupt(40.0, 40.0, 10.0, bad);
    if (verify_inner_barrier(corrupt, 60, 16).pass) {
        detail = "negative control passed unexpectedly";
        return false;
    }
    std::ostringstream ss;
    ss << "min scaled residual=" << worst;
    detail = ss.str();
    return true;
}

// ------------------------------------------------------------ criterion 6 --

bool flow_suite(std::string& detail) {
    GridPtr grid = make_grid(64, 64, 32);
    std::ostringstream ss;

    {  // Stationarity of the round bubble-sheet.
        FlowParams params;
        params.theta_symmetric = true;
        FlowSim sim(grid, params, GridFunction(grid), -200.0);
        for (int i = 0; i < 100; ++i) sim.step();
        const double sup = sim.u().sup_norm();
        ss << "stationary=" << sup;
        if (!(sup < 1e-12)) {
            detail = ss.str();
            return false;
        }
    }

    {  // Eigenmode growth rates within 1% per unit tau.
        const double eps = 1e-6;
        const auto& basis = spectral_basis(grid);
        struct Mode {
            const Eigenfunction* phi;
            double rate;
            std::function<double(double, double, double)> f;
        };
        const std::vector<Mode> modes = {
            {&basis.unstable()[0], 1.0, [&](double, double, double) { return eps; }},
            {&basis.unstable()[1], 0.5, [&](double a, double, double) { return eps * a; }},
            {&basis.neutral()[1], 0.0,
             [&](double, double b, double) { return eps * (b * b - 2.0); }},
        };
        for (const auto& mode : modes) {
            FlowParams params;
            params.theta_symmetric = true;
            FlowSim sim(grid, params, GridFunction::from_function(grid, mode.f), -400.0);
            const double c0 = inner_product(sim.u(), mode.phi->phi) / mode.phi->norm_squared;
            sim.run_until(-399.0);
            const double c1 = inner_product(sim.u(), mode.phi->phi) / mode.phi->norm_squared;
            const double measured = std::log(c1 / c0);
            if (std::fabs(measured - mode.rate) > 0.01) {
                ss << " rate(" << mode.phi->label << ")=" << measured;
                detail = ss.str();
                return false;
            }
        }
        ss << " rates ok";
    }

    {  // Normal-form run over tau in [-200, -150].
        const double tau0 = -200.0, tau_end = -150.0;
        FlowParams params;
        params.theta_symmetric = true;
        params.filter_unstable = true;
        GridFunction u0 = GridFunction::from_function(grid, [tau0](double, double b, double) {
            return (2.0 - b * b) / (kSqrt8 * std::fabs(tau0));
        });
        FlowSim sim(grid, params, u0, tau0);
        std::vector<double> taus = {sim.tau()};
        std::vector<double> alphas = {sim.observables().alpha[1]};
        const double record = 1.0;
        while (sim.tau() + 0.5 * params.dtau < tau_end) {
            sim.run_until(std::min(tau_end, sim.tau() + record));
            taus.push_back(sim.tau());
            alphas.push_back(sim.observables().alpha[1]);
        }
        double worst_ratio = 0.0;
        for (std::size_t k = 0; k < taus.size(); ++k) {
            const double target = -1.0 / kSqrt8;
            const double ratio = alphas[k] * std::fabs(taus[k]) / target;
            worst_ratio = std::max(worst_ratio, std::fabs(ratio - 1.0));
        }
        ss << " |alpha2 tau| dev=" << worst_ratio;
        if (worst_ratio > 0.10) {
            detail = ss.str();
            return false;
        }
        double worst_excess = 0.0;
        for (std::size_t k = 1; k + 1 < taus.size(); ++k) {
            const double d = (alphas[k + 1] - alphas[k - 1]) / (taus[k + 1] - taus[k - 1]);
            const double model = -kSqrt8 * alphas[k] * alphas[k];
            const double band = alphas[k] * alphas[k] * std::pow(-taus[k], -0.125) +
                                std::pow(-taus[k], -10.0);
            worst_excess = std::max(worst_excess, std::fabs(d - model) / band);
        }
        ss << " ode_band_use=" << worst_excess;
        if (worst_excess > 1.0) {
            detail = ss.str();
            return false;
        }
    }

    detail = ss.str();
    return true;
}

// ------------------------------------------------------------ criterion 7 --

bool comparison_suite(std::string& detail) {
    const ModelSurface cyl = ModelSurface::exact_cylinder();
    const double beta = 1e-3;
    const AnisoDistance dist(beta * beta, beta);
    std::ostringstream ss;

    {  // Equality case of the distance evolution at 100 samples.
        Rng rng(3);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double t = -std::exp(rng.uniform(1.0, 60.0));
            const double x1 = rng.uniform(-3.0, 3.0) * std::sqrt(-t);
            const auto g = cyl.geometry(x1, rng.uniform(-3.0, 3.0) * std::sqrt(-t),
                                        rng.uniform(0.0, 6.28), t);
            const double f1 = g.position[0] * g.position[0] / std::fabs(t);
            worst = std::max(worst,
                             std::fabs((f1 - 2.0 * (1.0 - g.nu1 * g.nu1)) - (f1 - 2.0)));
        }
        ss << "equality=" << worst;
        if (!(worst < 1e-8)) {
            detail = ss.str();
            return false;
        }
    }

    {  // Supersolution positivity at 1000 region samples each.
        Rng rng(5);
        const HeatBarrier psi = HeatBarrier::psi_b(2.0);
        std::vector<SurfacePoint> pts;
        for (int i = 0; i < 1000; ++i) {
            const double t = -std::exp(rng.uniform(5.0, 100.0));
            const double l = std::log(-t);
            pts.push_back({rng.uniform(-1.0, 1.0) * 2.0 * std::sqrt(-t) * l * l,
                           rng.uniform(-2.0, 2.0) * std::sqrt(-t), rng.uniform(0.0, 6.28), t});
        }
        const auto rep = check_jacobi_supersolution(psi, cyl, pts);
        ss << " psi_b_min=" << rep.min_residual;
        if (!rep.pass) {
            detail = ss.str();
            return false;
        }
        std::vector<SurfacePoint> pts2;
        for (int i = 0; i < 1000; ++i) {
            const double t = -std::exp(rng.uniform(50.0, 150.0));
            pts2.push_back({rng.uniform(-5.0, 5.0) * std::sqrt(-t),
                            rng.uniform(-2.0, 2.0) * std::sqrt(-t), rng.uniform(0.0, 6.28), t});
        }
        const auto rep2 = check_jacobi_supersolution(HeatBarrier::phi_delta(0.1), cyl, pts2);
        ss << " phi_delta_min=" << rep2.min_residual;
        if (!rep2.pass) {
            detail = ss.str();
            return false;
        }
    }

    {  // Half-line heat barrier.
        double worst = 0.0;
        bool shape_ok = true;
        Rng rng(7);
        for (int i = 0; i < 200; ++i) {
            // Keep x/(2 sqrt t) representable so the strict sign checks are
            // evaluated where the derivative does not underflow.
            const double x = std::exp(rng.uniform(-2.0, 1.5));
            const double t = std::exp(rng.uniform(-1.5, 3.0));
            const auto v = dirichlet_heat(x, t);
            shape_ok = shape_ok && v[1] > 0.0 && v[2] < 0.0;
            const double dt = 1e-5 * t;
            const double psit =
                (dirichlet_heat(x, t + dt)[0] - dirichlet_heat(x, t - dt)[0]) / (2.0 * dt);
            worst = std::max(worst, std::fabs(psit - v[2]));
        }
        shape_ok = shape_ok && dirichlet_heat(0.0, 1.7)[0] == 0.0;
        shape_ok = shape_ok && std::fabs(dirichlet_heat(20.0 * std::sqrt(2.0), 2.0)[0] - 1.0) < 1e-8;
        shape_ok = shape_ok && dirichlet_heat(1.5, 1e4 * 1.5 * 1.5)[0] < 1e-2;
        // Independent series value of the normalized error integral at 1.
        double series = 0.0, term = 1.0;
        for (int n = 0; n < 30; ++n) {
            series += term / (2 * n + 1);
            term *= -1.0 / (n + 1);
        }
        series *= 2.0 / std::sqrt(std::acos(-1.0));
        const double at_two_root_t = dirichlet_heat(2.0 * std::sqrt(5.0), 5.0)[0];
        ss << " heat_res=" << worst << " erf_dev=" << std::fabs(at_two_root_t - series);
        detail = ss.str();
        return shape_ok && worst < 1e-6 && std::fabs(at_two_root_t - series) < 1e-6;
    }
}

// ------------------------------------------------------------ criterion 8 --

bool reproducibility(std::string& detail) {
    namespace fs = std::filesystem;
    auto once = [&](const std::string& tag) {
        ExperimentConfig cfg = default_config("mz");
        cfg.params["runs"] = "10";
        cfg.params["samples"] = "200";
        cfg.output_dir = fs::temp_directory_path() / ("bslab_accept_" + tag);
        fs::remove_all(cfg.output_dir);
        const auto r = run_experiment(cfg);
        std::map<std::string, std::string> digests;
        for (const auto& e : r.artifacts) digests[e.filename] = e.sha256;
        return std::pair(r.status, digests);
    };
    const auto a = once("a");
    const auto b = once("b");
    const bool ok = a.first == 0 && b.first == 0 && a.second == b.second;
    detail = ok ? "byte-identical across reruns" : "digest mismatch";
    return ok;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1-spectral", 10.0, spectral_suite},
        {"2-phase-plane", 30.0, phase_plane_suite},
        {"3-mz-monte-carlo", 120.0, mz_monte_carlo},
        {"4-shrinker", 60.0, shrinker_suite},
        {"5-barrier", 120.0, barrier_suite},
        {"6-flow", 300.0, flow_suite},
        {"7-comparison", 30.0, comparison_suite},
        {"8-reproducibility", 60.0, reproducibility},
    };
    const int failures = run_all(criteria);
    if (failures == 0)
        std::printf("all %zu acceptance criteria satisfied\n", criteria.size());
    else
        std::printf("%d acceptance criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
