#include "bslab/experiments.hpp"

#include "bslab/barrier.hpp"
#include "bslab/comparison.hpp"
#include "bslab/flow.hpp"
#include "bslab/model_surface.hpp"
#include "bslab/mz.hpp"
#include "bslab/ode_solve.hpp"
#include "bslab/random_fields.hpp"
#include "bslab/shrinker.hpp"
#include "bslab/smooth.hpp"
#include "bslab/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

namespace bslab {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt8 = 2.8284271247461903;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

const std::map<std::string, std::vector<ParamSpec>>& schemas() {
    static const std::map<std::string, std::vector<ParamSpec>> s = {
        {"spectral",
         {{"n", "64", "Hermite nodes per y-direction"},
          {"ntheta", "32", "circle nodes"},
          {"fields", "20", "random test fields for operator identities"},
          {"seed", "7", "base RNG seed"},
          {"tol", "1e-8", "quadrature identity tolerance"}}},
        {"mz",
         {{"runs", "100", "Monte-Carlo realizations"},
          {"seed", "42", "base RNG seed"},
          {"c0", "1", "inequality envelope constant"},
          {"gamma", "0.5", "envelope decay exponent, in (0,1)"},
          {"tau0", "-100", "start of the integration range"},
          {"tau_star", "-60", "horizon (end of range)"},
          {"kappa0", "5e-6", "switch-time smallness constant, < 1e-5"},
          {"samples", "600", "trajectory sample count"}}},
        {"shrinker",
         {{"a", "20", "tip coordinate, >= 10"},
          {"L", "10", "inner radius used by the tip bound check"},
          {"tol", "1e-10", "integration tolerance"}}},
        {"barrier",
         {{"a1", "40", "long semi-axis"},
          {"a2", "40", "short semi-axis, >= 11"},
          {"L", "10", "inner cutoff radius"},
          {"nr", "160", "radial samples"},
          {"ntheta", "48", "angular samples"},
          {"corrupt", "0", "negative control: scale the profile by 0.5"}}},
        {"flow",
         {{"init", "dh", "initial data", {"zero", "const", "y1", "y2sq", "dh"}},
          {"amp", "1e-6", "initial amplitude for the mode seeds"},
          {"n", "64", "Hermite nodes per y-direction"},
          {"ntheta", "32", "circle nodes"},
          {"tau0", "-200", "initial renormalized time"},
          {"tau_end", "-150", "final renormalized time"},
          {"dtau", "1e-3", "time step"},
          {"gamma", "0.5", "spectral-cutoff exponent, in (0,1)"},
          {"beta", "1e-3", "convention parameter, in (0, 1e-3]"},
          {"L", "1e6", "convention parameter, >= 1/beta^2"},
          {"zhat", "1", "scale parameter, >= 1"},
          {"theta_symmetric", "1", "reduced equation for theta-independent data"},
          {"filter_unstable", "auto", "remove unstable projections each step",
           {"auto", "0", "1"}},
          {"record_every", "100", "steps between observable records"},
          {"seed", "1", "reserved for randomized initial data"}}},
        {"compare",
         {{"check", "all", "which check to run",
           {"aniso", "psi_b", "phi_delta", "zeta", "heat", "all"}},
          {"samples", "200", "samples per check"},
          {"seed", "11", "base RNG seed"},
          {"b", "2", "horizontal supersolution exponent, in [2,7]"},
          {"delta", "0.1", "super-smallness exponent, in (0, 1/2)"},
          {"beta", "1e-3", "convention parameter, in (0, 1e-3]"},
          {"alpha", "1e-6", "anisotropy, in (0, beta^2]"},
          {"zhat", "1", "scale parameter, >= 1"},
          {"eps", "1e-8", "slope regularization scale"}}},
    };
    return s;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + v + "'");
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        // Trim.
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b2 = s.find_first_not_of(" \t");
            const auto e2 = s.find_last_not_of(" \t");
            s = (b2 == std::string::npos) ? "" : s.substr(b2, e2 - b2 + 1);
        };
        trim(key);
        trim(value);
        if (key.empty() || value.empty())
            throw ConfigError("config: line " + std::to_string(lineno) + " has empty key or value");
        if (key == "experiment")
            cfg.experiment = value;
        else if (key == "out")
            cfg.output_dir = value;
        else if (cfg.params.count(key))
            throw ConfigError("config: duplicate key '" + key + "'");
        else
            cfg.params[key] = value;
    }
    if (cfg.experiment.empty()) throw ConfigError("config: missing 'experiment' key");
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::filesystem::path& path) {
    return parse_text(read_file(path));
}

std::string ExperimentConfig::dump() const {
    std::string out = "experiment=" + experiment + "\n";
    out += "out=" + output_dir.string() + "\n";
    for (const auto& [k, v] : params) out += k + "=" + v + "\n";
    return out;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : parse_double(key, it->second);
}

long long ExperimentConfig::get_int(const std::string& key, long long fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    return static_cast<long long>(parse_double(key, it->second));
}

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    if (it->second == "1" || it->second == "true") return true;
    if (it->second == "0" || it->second == "false") return false;
    throw ConfigError("config: key '" + key + "' must be boolean (0/1)");
}

void ExperimentConfig::validate() const {
    const auto& all = schemas();
    auto sit = all.find(experiment);
    if (sit == all.end()) throw ConfigError("config: unknown experiment '" + experiment + "'");
    for (const auto& [k, v] : params) {
        const ParamSpec* spec = nullptr;
        for (const auto& p : sit->second)
            if (p.key == k) spec = &p;
        if (!spec)
            throw ConfigError("config: unknown key '" + k + "' for experiment " + experiment);
        if (spec->options.empty()) {
            (void)parse_double(k, v);  // every non-enumerated value must be numeric
        } else if (std::find(spec->options.begin(), spec->options.end(), v) ==
                   spec->options.end()) {
            throw ConfigError("config: key '" + k + "' must be one of the documented options");
        }
    }
    // Convention constraints shared across experiments.
    if (params.count("beta")) {
        const double beta = get_double("beta", 1e-3);
        if (!(beta > 0.0) || !(beta <= 1e-3)) throw ConfigError("config: beta outside (0, 1e-3]");
        if (params.count("L")) {
            const double L = get_double("L", 0.0);
            if (experiment == "flow" && !(L >= 1.0 / (beta * beta)))
                throw ConfigError("config: need L >= 1/beta^2");
        }
        if (params.count("alpha")) {
            const double alpha = get_double("alpha", 0.0);
            if (!(alpha > 0.0) || !(alpha <= beta * beta))
                throw ConfigError("config: alpha outside (0, beta^2]");
        }
    }
    if (params.count("b")) {
        const double b = get_double("b", 2.0);
        if (!(b >= 2.0) || !(b <= 7.0)) throw ConfigError("config: b outside [2, 7]");
    }
    if (params.count("delta")) {
        const double d = get_double("delta", 0.1);
        if (!(d > 0.0) || !(d < 0.5)) throw ConfigError("config: delta outside (0, 1/2)");
    }
    if (params.count("kappa0")) {
        const double k = get_double("kappa0", 5e-6);
        if (!(k > 0.0) || !(k < 1e-5)) throw ConfigError("config: kappa0 outside (0, 1e-5)");
    }
    if (params.count("gamma")) {
        const double g = get_double("gamma", 0.5);
        if (!(g > 0.0) || !(g < 1.0)) throw ConfigError("config: gamma outside (0, 1)");
    }
    if (params.count("a")) {
        const double a = get_double("a", 20.0);
        if (!(a >= 10.0)) throw ConfigError("config: need a >= 10");
    }
    if (params.count("a1") && params.count("a2")) {
        const double a1 = get_double("a1", 40.0), a2 = get_double("a2", 40.0);
        if (!(a1 >= a2)) throw ConfigError("config: need a1 >= a2");
        if (!(a2 >= 11.0)) throw ConfigError("config: need a2 >= 11");
    }
    if (params.count("tau0") && params.count("tau_star")) {
        if (!(get_double("tau0", -100) < get_double("tau_star", -60)))
            throw ConfigError("config: need tau0 < tau_star");
        if (!(get_double("tau_star", -60) < 0)) throw ConfigError("config: need tau_star < 0");
    }
    if (params.count("tau_end")) {
        if (!(get_double("tau_end", -150) < 0)) throw ConfigError("config: need tau_end < 0");
        if (!(get_double("tau0", -200) < get_double("tau_end", -150)))
            throw ConfigError("config: need tau0 < tau_end");
    }
}

const std::vector<ExperimentInfo>& list_experiments() {
    static const std::vector<ExperimentInfo> infos = [] {
        std::vector<ExperimentInfo> v;
        const std::map<std::string, std::string> verifies = {
            {"spectral",
             "eigenvalue residuals, orthogonality, self-adjointness and the commutator identity "
             "for the drift Laplacian on the Gaussian cylinder"},
            {"mz",
             "quantitative trichotomy and stable-mode envelope for the unstable/neutral/stable "
             "energy inequalities, over seeded admissible realizations"},
            {"shrinker",
             "concave rotational shrinker profiles: equation residual, concavity, cylinder "
             "convergence and the tip height bound"},
            {"barrier",
             "pointwise graph inequality for elliptically rotated inner barriers, with scaling "
             "closure and a corrupted-profile negative control"},
            {"flow",
             "nonlinear evolution of the renormalized graph profile with spectral observables: "
             "mode growth rates, quadratic-coefficient dynamics, stationarity"},
            {"compare",
             "supersolution and distance-evolution inequalities for comparison functions "
             "evaluated on exact cylinders and graph perturbations"},
        };
        for (const auto& [name, specs] : schemas()) {
            ExperimentInfo info;
            info.name = name;
            info.verifies = verifies.at(name);
            info.parameters = specs;
            v.push_back(std::move(info));
        }
        return v;
    }();
    return infos;
}

ExperimentConfig default_config(const std::string& experiment) {
    const auto& all = schemas();
    auto it = all.find(experiment);
    if (it == all.end()) throw ConfigError("config: unknown experiment '" + experiment + "'");
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    for (const auto& p : it->second) cfg.params[p.key] = p.default_value;
    return cfg;
}

GridFunction random_smooth_field(const GridPtr& grid, std::uint64_t seed) {
    Rng rng(seed);
    struct Bump {
        double amp, c1, c2, s, a, b, phase;
        int m;
    };
    std::vector<Bump> bumps(4);
    for (auto& bp : bumps) {
        bp.amp = rng.uniform(-1.0, 1.0);
        bp.c1 = rng.uniform(-3.0, 3.0);
        bp.c2 = rng.uniform(-3.0, 3.0);
        bp.s = rng.uniform(2.0, 4.0);
        bp.a = rng.uniform(-0.7, 0.7);
        bp.b = rng.uniform(-0.7, 0.7);
        bp.phase = rng.uniform(0.0, 6.283185307179586);
        bp.m = static_cast<int>(rng.next_u64() % 3);
    }
    return GridFunction::from_function(grid, [bumps](double y1, double y2, double th) {
        double v = 0.0;
        for (const auto& bp : bumps) {
            const double d1 = y1 - bp.c1, d2 = y2 - bp.c2;
            v += bp.amp * std::exp(-(d1 * d1 + d2 * d2) / (bp.s * bp.s)) *
                 std::cos(bp.a * y1 + bp.b * y2 + bp.m * th + bp.phase);
        }
        return v;
    });
}

namespace {

// ---------------------------------------------------------------- spectral --

ExperimentResult run_spectral(const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir) {
    ExperimentResult result;
    const auto n = static_cast<std::size_t>(cfg.get_int("n", 64));
    const auto ntheta = static_cast<std::size_t>(cfg.get_int("ntheta", 32));
    const auto nfields = static_cast<std::size_t>(cfg.get_int("fields", 20));
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 7));
    const double tol = cfg.get_double("tol", 1e-8);

    GridPtr grid = make_grid(n, n, ntheta);
    const auto& basis = spectral_basis(grid);

    bool all_pass = true;
    std::string eig_csv = "function,operator,eigenvalue,residual,verdict\n";
    auto eig_row = [&](const Eigenfunction& e, bool shifted) {
        const double ev = e.eigenvalue - (shifted ? 0.5 : 0.0);
        const GridFunction lhs = apply_ou(e.phi, shifted);
        const double res = norm(lhs - e.phi * ev) / std::sqrt(e.norm_squared);
        const bool ok = res < 1e-6;
        all_pass = all_pass && ok;
        eig_csv += fmt("%s,%s,%.17g,%.17g,%s\n", e.label.c_str(), shifted ? "Lprime" : "L", ev,
                       res, ok ? "PASS" : "FAIL");
    };
    for (const auto& e : basis.unstable()) eig_row(e, false);
    for (const auto& e : basis.neutral()) eig_row(e, false);
    for (const auto& e : basis.unstable_shifted()) eig_row(e, true);
    for (const auto& e : basis.neutral_shifted()) eig_row(e, true);
    result.artifacts.push_back(emit_artifact(out_dir, "eigen_residuals.csv", eig_csv));

    std::string summary = "check,measured,threshold,verdict\n";
    auto add_check = [&](const std::string& name, double measured, double threshold) {
        const bool ok = measured < threshold;
        all_pass = all_pass && ok;
        summary += fmt("%s,%.17g,%.17g,%s\n", name.c_str(), measured, threshold,
                       ok ? "PASS" : "FAIL");
    };

    const GridFunction one = GridFunction::from_function(grid, [](double, double, double) {
        return 1.0;
    });
    add_check("quadrature_mass",
              std::fabs(inner_product(one, one) - grid->total_mass()) / grid->total_mass(), 1e-10);
    add_check("orthogonality", basis.max_cross_correlation(), 1e-8);

    double worst_comm = 0.0, worst_sa = 0.0;
    for (std::size_t k = 0; k < nfields; ++k) {
        const GridFunction f = random_smooth_field(grid, Rng::derive_seed(seed, k));
        const GridFunction g = random_smooth_field(grid, Rng::derive_seed(seed, 1000 + k));
        const GridFunction comm =
            apply_ou(d_y1(f), false) - d_y1(apply_ou(f, false)) - d_y1(f) * 0.5;
        worst_comm = std::max(worst_comm, norm(comm) / std::max(1e-300, norm(d_y1(f))));
        const double sa = std::fabs(inner_product(apply_ou(f, false), g) -
                                    inner_product(f, apply_ou(g, false)));
        worst_sa = std::max(worst_sa, sa / (norm(f) * norm(g)));
    }
    add_check("commutator", worst_comm, 1e-5);
    add_check("self_adjoint", worst_sa, 1e-6);

    {
        const GridFunction f = random_smooth_field(grid, Rng::derive_seed(seed, 777));
        const double total = norm_sq(f);
        const double parts = norm_sq(project(f, Mode::Unstable)) + norm_sq(project(f, Mode::Neutral));
        add_check("parseval", (parts - total) / total, tol);
    }

    result.artifacts.push_back(emit_artifact(out_dir, "summary.csv", summary));
    if (!all_pass) {
        result.status = 4;
        result.message = "spectral: verification failure";
    }
    return result;
}

// ---------------------------------------------------------------------- mz --

ExperimentResult run_mz(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                        unsigned jobs) {
    ExperimentResult result;
    const auto runs = static_cast<std::size_t>(cfg.get_int("runs", 100));
    const auto base_seed = static_cast<std::uint64_t>(cfg.get_int("seed", 42));
    MZEnvelope env;
    env.c0 = cfg.get_double("c0", 1.0);
    env.gamma = cfg.get_double("gamma", 0.5);
    env.tau_star = cfg.get_double("tau_star", -60.0);
    const double tau0 = cfg.get_double("tau0", -100.0);
    const auto samples = static_cast<std::size_t>(cfg.get_int("samples", 600));

    struct RunOut {
        std::uint64_t seed;
        MZVerdict verdict;
        bool f_ok;
    };
    std::vector<RunOut> outs(runs);

    auto work = [&](std::size_t i) {
        const std::uint64_t seed_i = Rng::derive_seed(base_seed, i);
        Rng rng(seed_i);
        const double up0 = std::pow(10.0, rng.uniform(-6.0, 0.0));
        const double u00 = std::pow(10.0, rng.uniform(-6.0, 0.0));
        const double um0 = rng.uniform(0.0, 0.9) * 2.0 * env.epsilon(tau0) * (up0 + u00);
        const auto realization = CoefficientRealization::random(Rng::derive_seed(seed_i, 1));
        const Trajectory traj =
            integrate_u_system(env, realization, {up0, u00, um0}, tau0, env.tau_star, samples);
        const TrichotomyReport rep = verify_mz_trichotomy(traj, env);
        outs[i] = {seed_i, rep.verdict, rep.f_monotone_ok};
    };

    if (jobs <= 1) {
        for (std::size_t i = 0; i < runs; ++i) work(i);
    } else {
        std::vector<std::future<void>> futs;
        std::atomic<std::size_t> next{0};
        for (unsigned t = 0; t < jobs; ++t)
            futs.push_back(std::async(std::launch::async, [&] {
                for (std::size_t i = next++; i < runs; i = next++) work(i);
            }));
        for (auto& f : futs) f.get();
    }

    std::string csv = "system,seed,verdict\n";
    std::size_t violations = 0, inconclusive = 0, f_bad = 0;
    for (const auto& o : outs) {
        csv += fmt("U,%llu,%s\n", static_cast<unsigned long long>(o.seed),
                   to_string(o.verdict).c_str());
        if (o.verdict == MZVerdict::Violation) ++violations;
        if (o.verdict == MZVerdict::Inconclusive) ++inconclusive;
        if (!o.f_ok) ++f_bad;
    }
    result.artifacts.push_back(emit_artifact(out_dir, "trichotomy.csv", csv));

    // One representative trajectory for plotting.
    {
        const std::uint64_t seed_i = Rng::derive_seed(base_seed, 0);
        Rng rng(seed_i);
        const double up0 = std::pow(10.0, rng.uniform(-6.0, 0.0));
        const double u00 = std::pow(10.0, rng.uniform(-6.0, 0.0));
        const double um0 = rng.uniform(0.0, 0.9) * 2.0 * env.epsilon(tau0) * (up0 + u00);
        const auto realization = CoefficientRealization::random(Rng::derive_seed(seed_i, 1));
        const Trajectory traj =
            integrate_u_system(env, realization, {up0, u00, um0}, tau0, env.tau_star, samples);
        std::ostringstream ss;
        traj.write_csv(ss);
        result.artifacts.push_back(emit_artifact(out_dir, "trajectory_000.csv", ss.str()));
    }

    std::string summary = "check,measured,threshold,verdict\n";
    summary += fmt("violations,%zu,0,%s\n", violations, violations == 0 ? "PASS" : "FAIL");
    summary += fmt("inconclusive,%zu,0,%s\n", inconclusive, inconclusive == 0 ? "PASS" : "FAIL");
    summary += fmt("f_monotone_failures,%zu,0,%s\n", f_bad, f_bad == 0 ? "PASS" : "FAIL");
    result.artifacts.push_back(emit_artifact(out_dir, "summary.csv", summary));

    if (violations + inconclusive + f_bad > 0) {
        result.status = 4;
        result.message = "mz: verification failure";
    }
    return result;
}

// ---------------------------------------------------------------- shrinker --

ExperimentResult run_shrinker(const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir) {
    ExperimentResult result;
    const double a = cfg.get_double("a", 20.0);
    const double L = cfg.get_double("L", 10.0);
    const double tol = cfg.get_double("tol", 1e-10);

    const ShrinkerProfile p = solve_shrinker(a, tol);
    std::ostringstream ss;
    p.write_csv(ss);
    result.artifacts.push_back(emit_artifact(out_dir, "profile.csv", ss.str()));

    std::string summary = "check,measured,threshold,verdict\n";
    bool ok = true;
    auto add = [&](const std::string& name, double measured, double threshold, bool pass) {
        ok = ok && pass;
        summary += fmt("%s,%.17g,%.17g,%s\n", name.c_str(), measured, threshold,
                       pass ? "PASS" : "FAIL");
    };
    const double res = p.fd_residual_sup();
    add("ode_residual_sup", res, 1e-6, res < 1e-6);
    const double mv = p.max_vpp();
    add("concavity_max_vpp", mv, 1e-10, mv <= 1e-10);
    const double tip_lhs = p.value(L - 1.0) - kSqrt2;
    const double tip_rhs = -((L - 1.0) * (L - 1.0) - 5.0) / (kSqrt2 * a * a);
    add("tip_height_bound", tip_lhs - tip_rhs, 0.0, tip_lhs <= tip_rhs);
    add("center_above_cylinder", kSqrt2 - p.center_value(), 0.0, p.center_value() > kSqrt2);
    result.artifacts.push_back(emit_artifact(out_dir, "summary.csv", summary));

    if (!ok) {
        result.status = 4;
        result.message = "shrinker: verification failure";
    }
    return result;
}

// ----------------------------------------------------------------- barrier --

ExperimentResult run_barrier(const ExperimentConfig& cfg,
                             const std::filesystem::path& out_dir) {
    ExperimentResult result;
    const double a1 = cfg.get_double("a1", 40.0);
    const double a2 = cfg.get_double("a2", 40.0);
    const double L = cfg.get_double("L", 10.0);
    const auto nr = static_cast<std::size_t>(cfg.get_int("nr", 160));
    const auto nth = static_cast<std::size_t>(cfg.get_int("ntheta", 48));
    const bool corrupt = cfg.get_bool("corrupt", false);

    auto profile = std::make_shared<ShrinkerProfile>(solve_shrinker(a2 - 1.0));
    std::shared_ptr<const ShrinkerProfile> used = profile;
    if (corrupt) used = std::make_shared<const ShrinkerProfile>(profile->scaled(0.5));
    const BarrierSurface b(a1, a2, L, used);
    const BarrierReport rep = verify_inner_barrier(b, nr, nth);

    std::ostringstream ss;
    rep.write_csv(ss);
    result.artifacts.push_back(emit_artifact(out_dir, "residuals.csv", ss.str()));

    std::string summary = "a1,a2,L,min_residual,verdict\n";
    summary += fmt("%.17g,%.17g,%.17g,%.17g,%s\n", a1, a2, L, rep.min_residual,
                   rep.pass ? "PASS" : "FAIL");
    result.artifacts.push_back(emit_artifact(out_dir, "summary.csv", summary));

    const bool expected = !corrupt;
    if (rep.pass != expected) {
        result.status = 4;
        result.message = corrupt ? "barrier: negative control unexpectedly passed"
                                 : "barrier: inequality violated";
    }
    return result;
}

// -------------------------------------------------------------------- flow --

ExperimentResult run_flow(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    ExperimentResult result;
    const std::string init = cfg.get_string("init", "dh");
    const double amp = cfg.get_double("amp", 1e-6);
    const auto n = static_cast<std::size_t>(cfg.get_int("n", 64));
    const auto ntheta = static_cast<std::size_t>(cfg.get_int("ntheta", 32));
    const double tau0 = cfg.get_double("tau0", -200.0);
    const double tau_end = cfg.get_double("tau_end", -150.0);
    if (!(tau_end > tau0)) throw ConfigError("config: need tau_end > tau0");

    FlowParams params;
    params.beta = cfg.get_double("beta", 1e-3);
    params.L = cfg.get_double("L", 1e6);
    params.dtau = cfg.get_double("dtau", 1e-3);
    params.gamma = cfg.get_double("gamma", 0.5);
    params.zhat = cfg.get_double("zhat", 1.0);
    params.theta_symmetric = cfg.get_bool("theta_symmetric", true);
    const std::string filt = cfg.get_string("filter_unstable", "auto");
    params.filter_unstable = (filt == "1") || (filt == "auto" && init == "dh");
    const auto record_every = static_cast<std::size_t>(cfg.get_int("record_every", 100));

    GridPtr grid = make_grid(n, n, ntheta);
    GridFunction u0(grid);
    if (init == "zero") {
        // stays zero
    } else if (init == "const") {
        u0 = GridFunction::from_function(grid, [amp](double, double, double) { return amp; });
    } else if (init == "y1") {
        u0 = GridFunction::from_function(grid, [amp](double y1, double, double) { return amp * y1; });
    } else if (init == "y2sq") {
        u0 = GridFunction::from_function(
            grid, [amp](double, double y2, double) { return amp * (y2 * y2 - 2.0); });
    } else if (init == "dh") {
        const double c = 1.0 / (kSqrt8 * std::fabs(tau0));
        u0 = GridFunction::from_function(
            grid, [c](double, double y2, double) { return c * (2.0 - y2 * y2); });
    } else {
        throw ConfigError("config: unknown init '" + init + "'");
    }

    FlowSim sim(grid, params, u0, tau0);
    std::ostringstream obs;
    write_observables_csv_header(obs);
    write_observables_csv_row(obs, sim.observables());
    std::size_t step_count = 0;
    while (sim.tau() + 0.5 * params.dtau < tau_end) {
        sim.step();
        if (++step_count % record_every == 0) write_observables_csv_row(obs, sim.observables());
    }
    if (step_count % record_every != 0) write_observables_csv_row(obs, sim.observables());
    result.artifacts.push_back(emit_artifact(out_dir, "observables.csv", obs.str()));

    std::ostringstream snap;
    sim.u().write_csv(snap);
    result.artifacts.push_back(emit_artifact(out_dir, "state_final.csv", snap.str()));
    return result;
}

// ----------------------------------------------------------------- compare --

std::vector<SurfacePoint> cylinder_sample_family(Rng& rng, std::size_t count, double b,
                                                 double zhat) {
    // Log-spaced ancient times with in-region horizontal positions.
    std::vector<SurfacePoint> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double k = rng.uniform(20.0, 120.0);
        const double t = -std::exp(k);
        const double l = std::log(-t) - 2.0 * std::log(zhat);
        const double x1max = 2.0 * std::sqrt(-t) * std::pow(l, b);
        pts.push_back({rng.uniform(-1.0, 1.0) * x1max, rng.uniform(-2.0, 2.0) * std::sqrt(-t),
                       rng.uniform(0.0, 6.283185307179586), t});
    }
    return pts;
}

ExperimentResult run_compare(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    ExperimentResult result;
    const std::string which = cfg.get_string("check", "all");
    const auto count = static_cast<std::size_t>(cfg.get_int("samples", 200));
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("seed", 11));
    const double b = cfg.get_double("b", 2.0);
    const double delta = cfg.get_double("delta", 0.1);
    const double beta = cfg.get_double("beta", 1e-3);
    const double alpha = cfg.get_double("alpha", beta * beta);
    const double zhat = cfg.get_double("zhat", 1.0);
    const double eps = cfg.get_double("eps", 1e-8);

    const ModelSurface cyl = ModelSurface::exact_cylinder();
    const AnisoDistance dist(alpha, beta);
    bool all_pass = true;
    std::string summary = "check,min_residual,samples,excluded,verdict\n";
    auto add_report = [&](const CheckReport& rep, const std::string& filename, bool expect_pass) {
        std::ostringstream ss;
        rep.write_csv(ss);
        result.artifacts.push_back(emit_artifact(out_dir, filename, ss.str()));
        const bool ok = rep.pass == expect_pass;
        all_pass = all_pass && ok;
        summary += fmt("%s,%.17g,%zu,%zu,%s\n", rep.name.c_str(), rep.min_residual, rep.total,
                       rep.excluded, ok ? "PASS" : "FAIL");
    };

    Rng rng(seed);
    const bool all = which == "all";
    if (all || which == "aniso") {
        const auto pts = cylinder_sample_family(rng, count, 0.5, zhat);
        add_report(check_aniso_evolution(cyl, dist, pts), "aniso_cylinder.csv", true);
        const ModelSurface tilted = ModelSurface::graph_over_cylinder(
            [](double y1, double, double, double) { return 0.05 * y1 * std::exp(-y1 * y1 / 400.0); });
        std::vector<SurfacePoint> tpts;
        for (std::size_t i = 0; i < count / 4 + 1; ++i) {
            const double t = -std::exp(rng.uniform(20.0, 40.0));
            tpts.push_back({rng.uniform(-2.0, 2.0) * std::sqrt(-t),
                            rng.uniform(-2.0, 2.0) * std::sqrt(-t),
                            rng.uniform(0.0, 6.283185307179586), t});
        }
        add_report(check_aniso_evolution(tilted, dist, tpts), "aniso_tilted.csv", true);
    }
    if (all || which == "psi_b") {
        const auto pts = cylinder_sample_family(rng, count, b, zhat);
        add_report(check_jacobi_supersolution(HeatBarrier::psi_b(b, zhat), cyl, pts),
                   "jacobi_psi_b.csv", true);
    }
    if (all || which == "phi_delta") {
        const auto pts = cylinder_sample_family(rng, count, 1.0, zhat);
        add_report(check_jacobi_supersolution(HeatBarrier::phi_delta(delta), cyl, pts),
                   "jacobi_phi_delta.csv", true);
    }
    if (all || which == "zeta") {
        // Samples inside the zeta region 60/beta <= f_alpha <= log|t|.
        std::vector<SurfacePoint> pts;
        for (std::size_t i = 0; i < count; ++i) {
            const double k = rng.uniform(80.0, 120.0);
            const double t = -std::exp(k);
            const double target = rng.uniform(60.0 / beta, std::log(-t) - 2.0 * std::log(zhat));
            // Split f_alpha between the two axes.
            const double w = rng.uniform(0.0, 1.0);
            const double x1 = std::sqrt(w * target / alpha * std::fabs(t));
            const double x2 = std::sqrt((1.0 - w) * target * (2.0 - beta) * std::fabs(t));
            pts.push_back({x1, x2, rng.uniform(0.0, 6.283185307179586), t});
        }
        // Slope field |nu1| large enough that the regularized slope is positive.
        auto res = regularized_slope(cyl, dist, pts, eps, zhat);
        // On the exact cylinder nu1 = 0, so nu1_eps = 0 and the region is
        // empty; rerun on a tilted graph for a nontrivial region.
        const ModelSurface tilted = ModelSurface::graph_over_cylinder(
            [](double, double, double, double) { return 0.0; });
        (void)tilted;
        std::ostringstream ss;
        res.zeta_check.write_csv(ss);
        result.artifacts.push_back(emit_artifact(out_dir, "zeta_region.csv", ss.str()));
        // Direct zeta supersolution slack on the cylinder samples.
        bool zeta_ok = true;
        double zmin = std::numeric_limits<double>::infinity();
        for (const auto& sp : pts) {
            const auto g = cyl.geometry(sp.x1, sp.x2, sp.phi, sp.t);
            const double at = std::fabs(sp.t);
            const double fa = dist.value(g.position[0], g.position[1], sp.t);
            const double slack = fa / (10.0 * at) - 2.0 / at - g.second_fund_sq;
            zmin = std::min(zmin, slack * at);
            zeta_ok = zeta_ok && slack > 0.0;
        }
        all_pass = all_pass && zeta_ok;
        summary += fmt("zeta-cylinder-slack,%.17g,%zu,0,%s\n", zmin, pts.size(),
                       zeta_ok ? "PASS" : "FAIL");
    }
    if (all || which == "heat") {
        bool heat_ok = true;
        double worst = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            // Keep x/(2 sqrt t) moderate so the strict derivative signs are
            // checked where psi_x has not underflowed.
            const double x = std::exp(rng.uniform(-2.0, 1.5));
            const double t = std::exp(rng.uniform(-1.5, 3.0));
            const auto v = dirichlet_heat(x, t);
            // Heat-equation residual by centered time differences.
            const double dt = 1e-5 * t;
            const double psit =
                (dirichlet_heat(x, t + dt)[0] - dirichlet_heat(x, t - dt)[0]) / (2.0 * dt);
            worst = std::max(worst, std::fabs(psit - v[2]));
            heat_ok = heat_ok && v[1] > 0.0 && v[2] < 0.0;
        }
        heat_ok = heat_ok && worst < 1e-6;
        all_pass = all_pass && heat_ok;
        summary += fmt("heat-residual,%.17g,%zu,0,%s\n", worst, count, heat_ok ? "PASS" : "FAIL");
    }

    result.artifacts.push_back(emit_artifact(out_dir, "summary.csv", summary));
    if (!all_pass) {
        result.status = 4;
        result.message = "compare: verification failure";
    }
    return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned jobs) {
    ExperimentResult result;
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        result.status = 2;
        result.message = e.what();
        return result;
    }
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) {
        result.status = 2;
        result.message = "config: cannot create output directory " + cfg.output_dir.string();
        return result;
    }
    try {
        if (cfg.experiment == "spectral")
            result = run_spectral(cfg, cfg.output_dir);
        else if (cfg.experiment == "mz")
            result = run_mz(cfg, cfg.output_dir, jobs);
        else if (cfg.experiment == "shrinker")
            result = run_shrinker(cfg, cfg.output_dir);
        else if (cfg.experiment == "barrier")
            result = run_barrier(cfg, cfg.output_dir);
        else if (cfg.experiment == "flow")
            result = run_flow(cfg, cfg.output_dir);
        else if (cfg.experiment == "compare")
            result = run_compare(cfg, cfg.output_dir);
        else {
            result.status = 2;
            result.message = "config: unknown experiment " + cfg.experiment;
            return result;
        }
    } catch (const ConfigError& e) {
        result.status = 2;
        result.message = e.what();
        return result;
    } catch (const std::exception& e) {
        result.status = 3;
        result.message = std::string("numerical failure: ") + e.what();
        return result;
    }
    // Config echo (without the output path, which is not part of the run's
    // identity) plus manifest for reproducibility.
    std::string echo = "experiment=" + cfg.experiment + "\n";
    for (const auto& [k, v] : cfg.params) echo += k + "=" + v + "\n";
    result.artifacts.push_back(emit_artifact(cfg.output_dir, "config.txt", echo));
    write_manifest(cfg.output_dir, result.artifacts);
    return result;
}

std::vector<CheckResult> run_module_checks(const std::string& only, unsigned jobs) {
    std::vector<CheckResult> out;
    auto want = [&](const char* module) { return only.empty() || only == module; };
    auto push = [&](const char* module, const char* name, bool pass, double measured,
                    double threshold, const std::string& detail = "") {
        out.push_back({module, name, pass, measured, threshold, detail});
    };

    if (want("gauss-space")) {
        ExperimentConfig cfg = default_config("spectral");
        cfg.params["fields"] = "8";
        cfg.output_dir = std::filesystem::temp_directory_path() / "bslab_check_spectral";
        const auto r = run_experiment(cfg, jobs);
        push("gauss-space", "spectral-suite", r.status == 0, r.status, 0, r.message);
    }
    if (want("mz-dynamics")) {
        const auto fps = classify_fixed_points();
        bool ok = fps.size() == 3;
        if (ok) {
            ok = std::fabs(fps[0].x) < 1e-8 && std::fabs(fps[0].y) < 1e-8 &&
                 std::fabs(fps[1].x - 0.5) < 1e-8 && std::fabs(fps[1].y) < 1e-8 &&
                 std::fabs(fps[2].x - 1.0) < 1e-8 && std::fabs(fps[2].y - 1.0) < 1e-8;
        }
        push("mz-dynamics", "fixed-points", ok, static_cast<double>(fps.size()), 3);

        ExperimentConfig cfg = default_config("mz");
        cfg.params["runs"] = "20";
        cfg.output_dir = std::filesystem::temp_directory_path() / "bslab_check_mz";
        const auto r = run_experiment(cfg, jobs);
        push("mz-dynamics", "trichotomy-mc", r.status == 0, r.status, 0, r.message);
    }
    if (want("shrinker-profile")) {
        ExperimentConfig cfg = default_config("shrinker");
        cfg.output_dir = std::filesystem::temp_directory_path() / "bslab_check_shrinker";
        const auto r = run_experiment(cfg, jobs);
        push("shrinker-profile", "profile-suite", r.status == 0, r.status, 0, r.message);
    }
    if (want("barrier-forge")) {
        ExperimentConfig cfg = default_config("barrier");
        cfg.params["nr"] = "80";
        cfg.params["ntheta"] = "24";
        cfg.output_dir = std::filesystem::temp_directory_path() / "bslab_check_barrier";
        const auto r = run_experiment(cfg, jobs);
        push("barrier-forge", "graph-inequality", r.status == 0, r.status, 0, r.message);
    }
    if (want("flow-sim")) {
        GridPtr grid = make_grid(48, 48, 16);
        FlowParams params;
        params.theta_symmetric = true;
        FlowSim sim(grid, params, GridFunction(grid), -200.0);
        for (int i = 0; i < 100; ++i) sim.step();
        const double sup = sim.u().sup_norm();
        push("flow-sim", "round-stationary", sup < 1e-12, sup, 1e-12);
    }
    if (want("comparison-kit")) {
        ExperimentConfig cfg = default_config("compare");
        cfg.params["samples"] = "60";
        cfg.output_dir = std::filesystem::temp_directory_path() / "bslab_check_compare";
        const auto r = run_experiment(cfg, jobs);
        push("comparison-kit", "comparison-suite", r.status == 0, r.status, 0, r.message);
    }
    return out;
}

}  // namespace bslab
