#include "bslab/ode_solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bslab {

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Hairer's continuous-extension weights.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct Stepper {
    const OdeRhs& rhs;
    std::size_t dim;
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp;

    explicit Stepper(const OdeRhs& f, std::size_t d)
        : rhs(f), dim(d), k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), k7(d), ytmp(d) {}

    // One step from (t, y) with size h; writes result into ynew and the embedded
    // error estimate into err. k1 must hold rhs(t, y) on entry (FSAL).
    void step(double t, const std::vector<double>& y, double h, std::vector<double>& ynew,
              double& err_norm, double rel_tol, double abs_tol) {
        auto axpy = [&](std::vector<double>& out, std::initializer_list<std::pair<double, const std::vector<double>*>> terms) {
            for (std::size_t i = 0; i < dim; ++i) {
                double s = y[i];
                for (const auto& [a, v] : terms) s += h * a * (*v)[i];
                out[i] = s;
            }
        };
        axpy(ytmp, {{a21, &k1}});
        rhs(t + c2 * h, ytmp, k2);
        axpy(ytmp, {{a31, &k1}, {a32, &k2}});
        rhs(t + c3 * h, ytmp, k3);
        axpy(ytmp, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
        rhs(t + c4 * h, ytmp, k4);
        axpy(ytmp, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
        rhs(t + c5 * h, ytmp, k5);
        axpy(ytmp, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
        rhs(t + h, ytmp, k6);
        axpy(ynew, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        rhs(t + h, ynew, k7);

        err_norm = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                  e7 * k7[i]);
            const double scale = abs_tol + rel_tol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
            err_norm = std::max(err_norm, std::fabs(e) / scale);
        }
    }
};

}  // namespace

OdeSolution integrate_dopri5(const OdeRhs& rhs, std::vector<double> y0, double t0, double t1,
                             std::size_t n_samples, const OdeOptions& opts) {
    if (n_samples < 2) throw std::invalid_argument("integrate_dopri5: need n_samples >= 2");
    if (t0 == t1) throw std::invalid_argument("integrate_dopri5: empty time range");
    const std::size_t dim = y0.size();
    const double dir = (t1 > t0) ? 1.0 : -1.0;

    OdeSolution sol;
    sol.times.resize(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s)
        sol.times[s] = t0 + (t1 - t0) * static_cast<double>(s) / (n_samples - 1);
    sol.states.reserve(n_samples);
    sol.states.push_back(y0);

    Stepper st(rhs, dim);
    std::vector<double> y = std::move(y0), ynew(dim);
    double t = t0;
    double h = (opts.fixed_step > 0.0 ? opts.fixed_step : opts.initial_step) * dir;
    std::size_t next_sample = 1;
    rhs(t, y, st.k1);

    const double range_eps = 1e-12 * std::fabs(t1 - t0) +
                             8.0 * std::numeric_limits<double>::epsilon() *
                                 std::max(std::fabs(t0), std::fabs(t1));
    // Fifth-order continuous extension on the accepted step [tprev, tprev + hs].
    std::vector<double> rc1(dim), rc2(dim), rc3(dim), rc4(dim), rc5(dim);
    auto record_until = [&](double tprev, double hs, double tcur) {
        while (next_sample < n_samples && (sol.times[next_sample] - tcur) * dir <= range_eps) {
            const double s = (sol.times[next_sample] - tprev) / hs;
            const double s1 = 1.0 - s;
            std::vector<double> out(dim);
            for (std::size_t i = 0; i < dim; ++i)
                out[i] = rc1[i] + s * (rc2[i] + s1 * (rc3[i] + s * (rc4[i] + s1 * rc5[i])));
            sol.states.push_back(std::move(out));
            ++next_sample;
        }
    };

    std::vector<double> yprev(dim);
    for (std::size_t step = 0; step < opts.max_steps && next_sample < n_samples; ++step) {
        if ((t + h - t1) * dir > 0.0) h = t1 - t;
        yprev = y;
        double err = 0.0;
        st.step(t, y, h, ynew, err, opts.rel_tol, opts.abs_tol);

        const bool accept = (opts.fixed_step > 0.0) || (err <= 1.0);
        if (accept) {
            for (std::size_t i = 0; i < dim; ++i) {
                const double dy = ynew[i] - y[i];
                const double bspl = h * st.k1[i] - dy;
                rc1[i] = y[i];
                rc2[i] = dy;
                rc3[i] = bspl;
                rc4[i] = dy - h * st.k7[i] - bspl;
                rc5[i] = h * (d1 * st.k1[i] + d3 * st.k3[i] + d4 * st.k4[i] + d5 * st.k5[i] +
                              d6 * st.k6[i] + d7 * st.k7[i]);
            }
            const double hs = h;
            t += h;
            y = ynew;
            st.k1 = st.k7;  // FSAL
            if (opts.clamp_nonnegative) {
                bool clamped = false;
                for (auto& v : y)
                    if (v < 0.0) {
                        v = 0.0;
                        clamped = true;
                    }
                if (clamped) rhs(t, y, st.k1);
            }
            double amax = 0.0;
            for (double v : y) amax = std::max(amax, std::fabs(v));
            if (!std::isfinite(amax) || amax > opts.blowup_threshold) {
                sol.blew_up = true;
                sol.blowup_time = t;
                break;
            }
            record_until(t - hs, hs, t);
            sol.steps_taken++;
        }
        if (opts.fixed_step <= 0.0) {
            const double safety = 0.9;
            double factor = (err > 0.0) ? safety * std::pow(err, -0.2) : 5.0;
            factor = std::clamp(factor, 0.2, 5.0);
            h *= factor;
            if (std::fabs(h) > opts.max_step) h = opts.max_step * dir;
            if (std::fabs(h) < 1e-14 * std::max(1.0, std::fabs(t)))
                throw std::runtime_error("integrate_dopri5: step size underflow");
        }
    }

    if (!sol.blew_up && next_sample < n_samples)
        throw std::runtime_error("integrate_dopri5: step budget exhausted before range end");
    sol.times.resize(sol.states.size());
    if (opts.clamp_nonnegative)
        for (auto& state : sol.states)
            for (auto& v : state) v = std::max(v, 0.0);
    return sol;
}

}  // namespace bslab
