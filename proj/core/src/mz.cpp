#include "bslab/mz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace bslab {

namespace {
constexpr double kSqrt8 = 2.8284271247461903;
constexpr double kSqrt2 = 1.4142135623730951;
}  // namespace

double MZEnvelope::epsilon(double tau) const {
    if (tau >= 0.0) throw std::invalid_argument("MZEnvelope: tau must be negative");
    return c0 * std::pow(-tau, -gamma);
}

void Trajectory::write_csv(std::ostream& os) const {
    os << time_label;
    for (const auto& c : components) os << ',' << c;
    os << " # system=" << system << '\n';
    char buf[64];
    for (std::size_t s = 0; s < times.size(); ++s) {
        std::snprintf(buf, sizeof(buf), "%.17g", times[s]);
        os << buf;
        for (double v : states[s]) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            os << buf;
        }
        os << '\n';
    }
}

CoefficientRealization CoefficientRealization::random(std::uint64_t seed) {
    Rng rng(seed);
    CoefficientRealization r;
    r.zero = false;
    r.c_plus = BoundedField(rng, 6, 0.05, 0.6);
    r.c_zero = BoundedField(rng, 6, 0.05, 0.6);
    r.c_minus = BoundedField(rng, 6, 0.05, 0.6);
    return r;
}

Trajectory integrate_u_system(const MZEnvelope& env, const CoefficientRealization& realization,
                              const std::array<double, 3>& u0, double tau0, double tau1,
                              std::size_t n_samples) {
    if (u0[0] < 0 || u0[1] < 0 || u0[2] < 0)
        throw std::invalid_argument("integrate_u_system: initial components must be nonnegative");
    if (std::max(tau0, tau1) > env.tau_star + 1e-12)
        throw std::invalid_argument("integrate_u_system: range must lie below the horizon");

    OdeRhs rhs = [&env, &realization](double tau, const std::vector<double>& u,
                                      std::vector<double>& du) {
        const double eps = env.epsilon(tau);
        const double total = u[0] + u[1] + u[2];
        const double cp = realization.zero ? 0.0 : realization.c_plus(tau);
        const double cz = realization.zero ? 0.0 : realization.c_zero(tau);
        const double cm = realization.zero ? 0.0 : realization.c_minus(tau);
        du[0] = u[0] + cp * eps * total;
        du[1] = cz * eps * total;
        du[2] = -u[2] + cm * eps * total;
    };

    OdeOptions opts;
    opts.clamp_nonnegative = true;
    opts.blowup_threshold = 1e280;  // exponential growth over long spans is expected
    OdeSolution sol =
        integrate_dopri5(rhs, {u0[0], u0[1], u0[2]}, tau0, tau1, n_samples, opts);

    Trajectory traj;
    traj.system = "U";
    traj.time_label = "tau";
    traj.components = {"Uplus", "Uzero", "Uminus"};
    traj.times = std::move(sol.times);
    traj.states = std::move(sol.states);
    traj.blew_up = sol.blew_up;
    traj.blowup_time = sol.blowup_time;
    return traj;
}

std::string to_string(MZVerdict v) {
    switch (v) {
        case MZVerdict::UnstableDominates: return "unstable-dominates";
        case MZVerdict::NeutralDominates: return "neutral-dominates";
        case MZVerdict::Violation: return "violation";
        case MZVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

TrichotomyReport verify_mz_trichotomy(const Trajectory& traj, const MZEnvelope& env) {
    TrichotomyReport rep;
    if (traj.size() < 8 || std::fabs(traj.times.back() - traj.times.front()) < 5.0) {
        rep.detail = "trajectory too short to classify";
        return rep;
    }
    if (traj.blew_up) {
        rep.verdict = MZVerdict::Violation;
        rep.detail = "blow-up inside range";
        return rep;
    }

    // Normalize to increasing tau.
    std::vector<std::size_t> order(traj.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (traj.times.front() > traj.times.back()) std::reverse(order.begin(), order.end());

    const double rel_band = 1e-12;
    int last_sign = 0;
    std::size_t transitions = 0;
    bool bad_transition = false;
    std::optional<double> crossing;
    double prev_tau = 0.0, prev_s = 0.0;

    rep.stable_bound_ok = true;
    rep.f_monotone_ok = true;
    double prev_f = 0.0;
    bool have_prev_f = false;

    for (std::size_t n = 0; n < order.size(); ++n) {
        const auto i = order[n];
        const double tau = traj.times[i];
        const double up = traj.states[i][0], u0 = traj.states[i][1], um = traj.states[i][2];
        const double delta = std::pow(-tau, -env.gamma / 2.0);
        const double eps = env.epsilon(tau);

        // Stable-mode envelope bound.
        const double cap = 2.0 * eps * (up + u0);
        const double excess = (cap > 0.0) ? um / cap : (um > 0.0 ? 2.0 : 0.0);
        rep.stable_bound_excess = std::max(rep.stable_bound_excess, excess);
        if (um > cap * (1.0 + 1e-9) + 1e-300) rep.stable_bound_ok = false;

        // Monotonicity of f = U- - 2 eps (U+ + U0) wherever f >= 0.
        const double f = um - 2.0 * eps * (up + u0);
        if (have_prev_f && prev_f >= 0.0) {
            const double scale = std::max({std::fabs(prev_f), up + u0 + um, 1e-30});
            if (f > prev_f + 1e-7 * scale) rep.f_monotone_ok = false;
        }
        prev_f = f;
        have_prev_f = true;

        // Dichotomy sign sequence.
        const double s = up - delta * u0;
        const double band = rel_band * (up + delta * u0 + 1e-300);
        int sign = 0;
        if (s > band)
            sign = 1;
        else if (s < -band)
            sign = -1;
        if (sign != 0) {
            if (last_sign != 0 && sign != last_sign) {
                ++transitions;
                if (sign < 0)
                    bad_transition = true;  // fell back below after dominating
                else if (prev_s != s)
                    crossing = prev_tau + (tau - prev_tau) * (0.0 - prev_s) / (s - prev_s);
            }
            last_sign = sign;
            prev_tau = tau;
            prev_s = s;
        }
    }

    const bool single = transitions <= 1 && !bad_transition;
    if (!rep.stable_bound_ok || !single) {
        rep.verdict = MZVerdict::Violation;
        rep.detail = !rep.stable_bound_ok ? "stable mode exceeds envelope bound"
                                          : "multiple or downward dichotomy crossings";
        return rep;
    }
    rep.crossing_tau = crossing;
    rep.verdict = (last_sign >= 0) ? MZVerdict::UnstableDominates : MZVerdict::NeutralDominates;
    return rep;
}

std::array<double, 3> alpha_rhs(const MZEnvelope& env, const CoefficientRealization& realization,
                                double tau, const std::array<double, 3>& a) {
    const double asq = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
    const double band =
        env.c0 * (asq * std::pow(-tau, -env.gamma / 4.0) + std::pow(-tau, -10.0));
    const double e1 = realization.zero ? 0.0 : band * realization.c_plus(tau);
    const double e2 = realization.zero ? 0.0 : band * realization.c_zero(tau);
    const double e3 = realization.zero ? 0.0 : band * realization.c_minus(tau);
    return {-kSqrt8 * (a[0] * a[0] + a[2] * a[2]) + e1,
            -kSqrt8 * (a[1] * a[1] + a[2] * a[2]) + e2,
            -kSqrt8 * (a[0] + a[1]) * a[2] + e3};
}

Trajectory integrate_alpha(const MZEnvelope& env, const CoefficientRealization& realization,
                           const std::array<double, 3>& alpha0, double tau0, double tau1,
                           std::size_t n_samples) {
    OdeRhs rhs = [&](double tau, const std::vector<double>& a, std::vector<double>& da) {
        const auto d = alpha_rhs(env, realization, tau, {a[0], a[1], a[2]});
        da[0] = d[0];
        da[1] = d[1];
        da[2] = d[2];
    };
    OdeOptions opts;
    opts.blowup_threshold = 1e6;
    OdeSolution sol = integrate_dopri5(rhs, {alpha0[0], alpha0[1], alpha0[2]}, tau0, tau1,
                                       n_samples, opts);
    Trajectory traj;
    traj.system = "alpha";
    traj.time_label = "tau";
    traj.components = {"alpha1", "alpha2", "alpha3"};
    traj.times = std::move(sol.times);
    traj.states = std::move(sol.states);
    traj.blew_up = sol.blew_up;
    traj.blowup_time = sol.blowup_time;
    return traj;
}

XYPerturbation XYPerturbation::random(std::uint64_t seed, double amplitude, double gamma) {
    Rng rng(seed);
    XYPerturbation p;
    p.zero = false;
    p.amplitude = amplitude;
    p.gamma = gamma;
    p.f1 = BoundedField(rng, 5, 0.1, 1.0);
    p.f2 = BoundedField(rng, 5, 0.1, 1.0);
    return p;
}

std::array<double, 2> XYPerturbation::operator()(double sigma) const {
    if (zero) return {0.0, 0.0};
    const double a = amplitude * std::exp(-gamma * sigma / 4.0);
    return {a * f1(sigma), a * f2(sigma)};
}

Trajectory integrate_xy(const std::array<double, 2>& xy0, double sigma0, double sigma1,
                        const XYPerturbation& pert, std::size_t n_samples) {
    OdeRhs rhs = [&](double s, const std::vector<double>& v, std::vector<double>& dv) {
        const auto p = pert(s);
        dv[0] = v[0] + v[1] - 2.0 * v[0] * v[0] + p[0];
        dv[1] = 2.0 * v[1] - 2.0 * v[0] * v[1] + p[1];
    };
    OdeOptions opts;
    opts.blowup_threshold = 1e6;
    OdeSolution sol = integrate_dopri5(rhs, {xy0[0], xy0[1]}, sigma0, sigma1, n_samples, opts);
    Trajectory traj;
    traj.system = "xy";
    traj.time_label = "sigma";
    traj.components = {"x", "y"};
    traj.times = std::move(sol.times);
    traj.states = std::move(sol.states);
    traj.blew_up = sol.blew_up;
    traj.blowup_time = sol.blowup_time;
    return traj;
}

ConfinementReport check_xy_confinement(const Trajectory& traj, double kappa, double gamma,
                                       double slack_c) {
    ConfinementReport rep;
    const double xmin = kSqrt2 * kappa / 3.0;
    const double xmax = 2.0 * kSqrt2;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double sigma = traj.times[i];
        const double x = traj.states[i][0], y = traj.states[i][1];
        const double slack = slack_c * std::exp(-gamma * sigma / 4.0);
        const double ugap = y - x * x;
        const double lgap = -y;
        rep.worst_upper_slack = std::max(rep.worst_upper_slack, ugap / std::max(slack, 1e-300));
        rep.worst_lower_slack = std::max(rep.worst_lower_slack, lgap / std::max(slack, 1e-300));
        const bool inside = x >= xmin && x <= xmax && ugap <= slack && lgap <= slack;
        if (!inside && rep.ok) {
            rep.ok = false;
            rep.exit_sigma = sigma;
        }
    }
    return rep;
}

std::vector<FixedPoint> classify_fixed_points() {
    auto value = [](double x, double y) {
        return std::array<double, 2>{x + y - 2.0 * x * x, 2.0 * y - 2.0 * x * y};
    };
    std::vector<FixedPoint> found;
    for (int ix = -2; ix <= 6; ++ix)
        for (int iy = -2; iy <= 6; ++iy) {
            double x = 0.25 * ix, y = 0.25 * iy;
            bool converged = false;
            for (int it = 0; it < 80; ++it) {
                const auto v = value(x, y);
                const double res = std::fabs(v[0]) + std::fabs(v[1]);
                if (res < 1e-14) {
                    converged = true;
                    break;
                }
                const double j11 = 1.0 - 4.0 * x, j12 = 1.0, j21 = -2.0 * y, j22 = 2.0 - 2.0 * x;
                const double det = j11 * j22 - j12 * j21;
                if (std::fabs(det) < 1e-14) break;
                double dx = (v[0] * j22 - v[1] * j12) / det;
                double dy = (j11 * v[1] - j21 * v[0]) / det;
                // Damping for far-off seeds.
                const double step = std::hypot(dx, dy);
                if (step > 0.5) {
                    dx *= 0.5 / step;
                    dy *= 0.5 / step;
                }
                x -= dx;
                y -= dy;
                if (!std::isfinite(x) || !std::isfinite(y) || std::fabs(x) > 50 ||
                    std::fabs(y) > 50)
                    break;
            }
            if (!converged) continue;
            bool dup = false;
            for (const auto& fp : found)
                if (std::fabs(fp.x - x) + std::fabs(fp.y - y) < 1e-8) dup = true;
            if (dup) continue;

            FixedPoint fp;
            fp.x = x;
            fp.y = y;
            const double j11 = 1.0 - 4.0 * x, j12 = 1.0, j21 = -2.0 * y, j22 = 2.0 - 2.0 * x;
            const double tr = j11 + j22, det = j11 * j22 - j12 * j21;
            const double disc = tr * tr - 4.0 * det;
            if (disc >= 0.0) {
                const double rt = std::sqrt(disc);
                fp.eigenvalues = {(tr - rt) / 2.0, (tr + rt) / 2.0};
                if (fp.eigenvalues[0] > 0.0)
                    fp.type = "unstable node";
                else if (fp.eigenvalues[1] < 0.0)
                    fp.type = "stable node";
                else
                    fp.type = "saddle";
            } else {
                fp.eigenvalues = {tr / 2.0, tr / 2.0};
                fp.type = (tr < 0.0) ? "stable spiral" : "unstable spiral";
            }
            found.push_back(fp);
        }
    std::sort(found.begin(), found.end(), [](const FixedPoint& a, const FixedPoint& b) {
        return a.x + a.y < b.x + b.y;
    });
    return found;
}

Trajectory integrate_z(const std::function<double(double)>& x_of_sigma,
                       const std::function<double(double)>& q_of_sigma, double z0, double sigma0,
                       double sigma1, std::size_t n_samples) {
    OdeRhs rhs = [&](double s, const std::vector<double>& v, std::vector<double>& dv) {
        dv[0] = (1.0 - 2.0 * x_of_sigma(s)) * v[0] + q_of_sigma(s);
    };
    OdeSolution sol = integrate_dopri5(rhs, {z0}, sigma0, sigma1, n_samples);
    Trajectory traj;
    traj.system = "z";
    traj.time_label = "sigma";
    traj.components = {"z"};
    traj.times = std::move(sol.times);
    traj.states = std::move(sol.states);
    traj.blew_up = sol.blew_up;
    traj.blowup_time = sol.blowup_time;
    return traj;
}

ZBoundReport z_bound_report(const Trajectory& ztraj, double gamma, double c_limit) {
    ZBoundReport rep;
    for (std::size_t i = 0; i < ztraj.size(); ++i) {
        const double s = ztraj.times[i];
        const double az = std::fabs(ztraj.states[i][0]);
        rep.measured_c_quarter = std::max(rep.measured_c_quarter, az * std::exp(gamma * s / 4.0));
        rep.measured_c_eighth = std::max(rep.measured_c_eighth, az * std::exp(gamma * s / 8.0));
    }
    rep.decay_bound_ok = rep.measured_c_eighth <= c_limit;
    return rep;
}

SwitchTime switch_time(const Trajectory& alpha_traj, double kappa0) {
    if (alpha_traj.size() == 0) throw std::invalid_argument("switch_time: empty trajectory");

    // Work in increasing tau; tau_star is the top of the sampled range.
    std::vector<std::size_t> order(alpha_traj.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    if (alpha_traj.times.front() > alpha_traj.times.back())
        std::reverse(order.begin(), order.end());

    auto g = [&](std::size_t i) {
        const auto& a = alpha_traj.states[i];
        const double mag = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
        return mag * std::fabs(alpha_traj.times[i]) - kappa0;
    };

    // Scan downward from the top for the first failure of the smallness bound.
    std::size_t top = order.size();
    while (top > 0 && g(order[top - 1]) <= 0.0) --top;
    if (top == 0) return {true, 0.0};
    const double tau_star = alpha_traj.times[order.back()];
    if (top == order.size()) return {false, tau_star};

    // Crossing lies between order[top-1] (fails) and order[top] (holds): bisect
    // on linearly interpolated states.
    const std::size_t lo = order[top - 1], hi = order[top];
    double ta = alpha_traj.times[lo], tb = alpha_traj.times[hi];
    auto geval = [&](double t) {
        const double w = (t - ta) / (tb - ta);
        double mag2 = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double v =
                (1.0 - w) * alpha_traj.states[lo][c] + w * alpha_traj.states[hi][c];
            mag2 += v * v;
        }
        return std::sqrt(mag2) * std::fabs(t) - kappa0;
    };
    double a = ta, b = tb;
    for (int it = 0; it < 100 && (b - a) > 1e-12 * std::fabs(ta); ++it) {
        const double m = 0.5 * (a + b);
        if (geval(m) > 0.0)
            a = m;
        else
            b = m;
    }
    return {false, 0.5 * (a + b)};
}

}  // namespace bslab
