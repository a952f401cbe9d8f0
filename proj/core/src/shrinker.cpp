#include "bslab/shrinker.hpp"

#include "bslab/ode_solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace bslab {

double shrinker_vpp(double y, double v, double vp) {
    return (1.0 + vp * vp) * (0.5 * y * vp - 0.5 * v + 1.0 / v);
}

namespace {

// Inverted-coordinate right-hand side: state (y, w) as functions of v, with
// w = dy/dv;  w' = -(1+w^2) (y/2 + w/v - w v / 2).
void inverted_rhs(double v, const std::vector<double>& s, std::vector<double>& ds) {
    const double y = s[0], w = s[1];
    ds[0] = w;
    ds[1] = -(1.0 + w * w) * (0.5 * y + w / v - 0.5 * w * v);
}

struct TipSeries {
    double lambda, mu, nu;
    explicit TipSeries(double a) {
        lambda = a / 4.0;
        mu = -lambda * (1.0 + 4.0 * lambda * lambda) / 16.0;
        nu = (3.0 * mu / 8.0 + lambda * lambda * mu - lambda * lambda * lambda / 4.0) / 6.0;
    }
    double y(double a, double v) const {
        const double v2 = v * v;
        return a + v2 * (-lambda / 2.0 + v2 * (mu / 4.0 + v2 * nu / 6.0));
    }
    double w(double v) const {
        const double v2 = v * v;
        return v * (-lambda + v2 * (mu + v2 * nu));
    }
};

// Hermite interpolation of (f, f') samples on an increasing abscissa array.
struct HermiteTable {
    const std::vector<double>* x = nullptr;
    const std::vector<double>* f = nullptr;
    const std::vector<double>* df = nullptr;

    double operator()(double xq, double* deriv = nullptr) const {
        const auto& xs = *x;
        auto it = std::upper_bound(xs.begin(), xs.end(), xq);
        std::size_t hi = std::clamp<std::size_t>(it - xs.begin(), 1, xs.size() - 1);
        const std::size_t lo = hi - 1;
        const double h = xs[hi] - xs[lo];
        const double s = (xq - xs[lo]) / h;
        const double f0 = (*f)[lo], f1 = (*f)[hi], d0 = (*df)[lo], d1 = (*df)[hi];
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s),
                     h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
        if (deriv) {
            const double g00 = 6 * s * (s - 1), g10 = (1 - s) * (1 - 3 * s),
                         g01 = -6 * s * (s - 1), g11 = s * (3 * s - 2);
            *deriv = (g00 * f0 + g01 * f1) / h + g10 * d0 + g11 * d1;
        }
        return h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1;
    }
};

}  // namespace

ShrinkerProfile solve_shrinker(double a, double tol) {
    if (!(a >= 10.0)) throw std::invalid_argument("solve_shrinker: need a >= 10");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_shrinker: tol must be positive");

    ShrinkerProfile p;
    p.a_ = a;
    p.solution_ = true;

    // Seed just off the tip; the quintic series keeps the truncation error
    // around (lambda v)^7 ~ 1e-12 relative for v_eps = 0.04/ a * 4.
    TipSeries series(a);
    const double v_eps = 0.08 / a;
    std::vector<double> s0 = {series.y(a, v_eps), series.w(v_eps)};

    // Inverted sweep until the graph slope reaches -1 (|w| = 1).
    OdeOptions iopts;
    iopts.rel_tol = std::min(tol, 1e-12);
    iopts.abs_tol = 1e-15;
    iopts.max_step = 0.05;

    double v_hi = std::sqrt(2.0) * 1.2;  // upper bound; the slope flattens well before
    OdeSolution inv;
    {
        // March in chunks until the graph slope reaches -1/2 (|w| = 2), so the
        // graph sweep that follows only sees moderate derivatives.
        double vlo = v_eps, vhi = v_hi;
        std::vector<double> state = s0;
        const double dv = 0.02 / std::sqrt(a);
        while (vlo < vhi) {
            const double vnext = std::min(vlo + dv, vhi);
            OdeSolution chunk = integrate_dopri5(inverted_rhs, state, vlo, vnext, 2, iopts);
            if (std::fabs(chunk.states.back()[1]) >= 4.0 || vnext >= vhi) {
                vhi = vnext;
                break;
            }
            state = chunk.states.back();
            vlo = vnext;
        }
        // Sample spacing balances derivative-measurement noise (~eps/h)
        // against interpolation truncation (~h^4); ~2.5e-4 is near the
        // optimum for the downstream residual checks.
        const std::size_t nsamp = std::clamp<std::size_t>(
            static_cast<std::size_t>((vhi - v_eps) / 2.5e-4), 321, 2001);
        inv = integrate_dopri5(inverted_rhs, s0, v_eps, vhi, nsamp, iopts);
    }

    // Tip tables including the exact tip point.
    p.tv_.push_back(0.0);
    p.ty_.push_back(a);
    p.tw_.push_back(0.0);
    for (std::size_t i = 0; i < inv.times.size(); ++i) {
        p.tv_.push_back(inv.times[i]);
        p.ty_.push_back(inv.states[i][0]);
        p.tw_.push_back(inv.states[i][1]);
    }
    const double v_sw = p.tv_.back();
    const double y_sw = p.ty_.back();
    const double w_sw = p.tw_.back();
    p.y_switch_ = y_sw;
    if (y_sw <= 0.0 || y_sw >= a)
        throw std::runtime_error("solve_shrinker: inverted sweep left the profile domain");

    // Final graded mesh: geometric clustering toward the tip with ratio 1.05,
    // spacing capped by the tip curvature scale.
    std::vector<double> offsets;
    const double h_cap = 0.2 / a;
    double d = 1e-7 * a;
    while (d < a) {
        offsets.push_back(d);
        const double step = std::min(0.05 * d, h_cap);
        d += step;
    }
    p.y_.push_back(0.0);
    for (auto it = offsets.rbegin(); it != offsets.rend(); ++it) {
        const double yq = a - *it;
        if (yq > 1e-12) p.y_.push_back(yq);
    }
    p.y_.push_back(a);

    // Tip branch of the mesh: invert y(v) on the monotone inverted table.
    HermiteTable ytab{&p.tv_, &p.ty_, &p.tw_};
    p.v_.assign(p.y_.size(), 0.0);
    p.vp_.assign(p.y_.size(), 0.0);
    p.vpp_.assign(p.y_.size(), 0.0);
    std::size_t first_tip = p.y_.size();
    for (std::size_t k = 0; k < p.y_.size(); ++k) {
        const double yq = p.y_[k];
        if (yq >= a) {
            p.v_[k] = 0.0;
            p.vp_[k] = -std::numeric_limits<double>::infinity();
            p.vpp_[k] = -std::numeric_limits<double>::infinity();
            continue;
        }
        if (yq <= y_sw) continue;
        first_tip = std::min(first_tip, k);
        double lo = 0.0, hi = v_sw;
        for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + v_sw); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (ytab(mid) > yq)
                lo = mid;
            else
                hi = mid;
        }
        const double vq = 0.5 * (lo + hi);
        double w;
        ytab(vq, &w);
        p.v_[k] = vq;
        p.vp_[k] = 1.0 / w;
        p.vpp_[k] = shrinker_vpp(yq, vq, 1.0 / w);
    }

    // Body of the mesh: march the graph equation through the nodes in
    // descending y, so every stored sample is a direct integrator value.
    OdeRhs graph_rhs = [](double y, const std::vector<double>& s, std::vector<double>& ds) {
        ds[0] = s[1];
        ds[1] = shrinker_vpp(y, s[0], s[1]);
    };
    OdeOptions gopts;
    gopts.rel_tol = std::min(tol, 1e-11);
    gopts.abs_tol = 1e-14;
    std::vector<double> state = {v_sw, 1.0 / w_sw};
    double ycur = y_sw;
    for (std::size_t k = first_tip; k-- > 0;) {
        const double yq = p.y_[k];
        OdeSolution seg = integrate_dopri5(graph_rhs, state, ycur, yq, 2, gopts);
        if (seg.blew_up) throw std::runtime_error("solve_shrinker: graph sweep blew up");
        state = seg.states.back();
        ycur = yq;
        if (!(state[0] > 0.0))
            throw std::runtime_error("solve_shrinker: profile lost positivity before y = 0");
        p.v_[k] = state[0];
        p.vp_[k] = state[1];
        p.vpp_[k] = shrinker_vpp(yq, state[0], state[1]);
    }
    return p;
}

std::array<double, 3> ShrinkerProfile::evaluate(double y) const {
    if (!(y >= 0.0) || !(y <= a_))
        throw std::invalid_argument("ShrinkerProfile::evaluate: y outside [0, a]");
    if (y >= a_) return {0.0, -std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity()};
    if (y > y_switch_) {
        HermiteTable ytab{&tv_, &ty_, &tw_};
        double lo = 0.0, hi = tv_.back();
        for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + tv_.back()); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (ytab(mid) > y)
                lo = mid;
            else
                hi = mid;
        }
        const double v = 0.5 * (lo + hi);
        double w;
        ytab(v, &w);
        const double vp = 1.0 / w;
        return {v, vp, shrinker_vpp(y, v, vp)};
    }
    // Body: Hermite interpolation on the stored graded mesh; the second
    // derivative interpolates the stored (vp, vpp) pair so scaled copies stay
    // self-consistent.
    auto it = std::upper_bound(y_.begin(), y_.end(), y);
    std::size_t hi = std::clamp<std::size_t>(it - y_.begin(), 1, y_.size() - 1);
    const std::size_t lo = hi - 1;
    const double h = y_[hi] - y_[lo];
    const double s = (y - y_[lo]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s),
                 h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    const double v = h00 * v_[lo] + h10 * h * vp_[lo] + h01 * v_[hi] + h11 * h * vp_[hi];
    const double g00 = 6 * s * (s - 1) / h, g10 = (1 - s) * (1 - 3 * s),
                 g01 = -6 * s * (s - 1) / h, g11 = s * (3 * s - 2);
    const double vp = g00 * v_[lo] + g10 * vp_[lo] + g01 * v_[hi] + g11 * vp_[hi];
    const double vpp = solution_ ? shrinker_vpp(y, v, vp)
                                 : h00 * vpp_[lo] + h01 * vpp_[hi];
    return {v, vp, vpp};
}

double ShrinkerProfile::fd_residual_sup() const {
    // Five-point Lagrange differentiation on the nonuniform mesh for the body,
    // and on the inverted samples near the tip, independent of stored slopes.
    auto lagrange_d1d2 = [](const double* x, const double* f, double xc, double& d1, double& d2) {
        d1 = 0.0;
        d2 = 0.0;
        for (int j = 0; j < 5; ++j) {
            // First derivative weight.
            double s1 = 0.0, s2 = 0.0;
            for (int m = 0; m < 5; ++m) {
                if (m == j) continue;
                double term = 1.0;
                for (int k = 0; k < 5; ++k) {
                    if (k == j || k == m) continue;
                    term *= (xc - x[k]) / (x[j] - x[k]);
                }
                s1 += term / (x[j] - x[m]);
                // Second derivative: sum over pairs (m, n).
                for (int n = 0; n < 5; ++n) {
                    if (n == j || n == m) continue;
                    double t2 = 1.0;
                    for (int k = 0; k < 5; ++k) {
                        if (k == j || k == m || k == n) continue;
                        t2 *= (xc - x[k]) / (x[j] - x[k]);
                    }
                    s2 += t2 / ((x[j] - x[m]) * (x[j] - x[n]));
                }
            }
            d1 += f[j] * s1;
            d2 += f[j] * s2;
        }
    };

    double worst = 0.0;
    // Body region: stop before the tip branch.
    for (std::size_t i = 2; i + 2 < y_.size(); ++i) {
        if (y_[i] > y_switch_) break;
        double d1, d2;
        lagrange_d1d2(&y_[i - 2], &v_[i - 2], y_[i], d1, d2);
        const double res = d2 / (1.0 + d1 * d1) - 0.5 * y_[i] * d1 + 0.5 * v_[i] - 1.0 / v_[i];
        worst = std::max(worst, std::fabs(res));
    }
    // Tip region in inverted coordinates: residual of the same equation,
    //   -w'/(w (1+w^2)) - (y/2)/w + v/2 - 1/v = 0, w' estimated from samples.
    // Rows whose stencil touches the exact-tip node or the series seam are
    // boundary rows, not interior ones.
    for (std::size_t i = 4; i + 2 < tv_.size(); ++i) {
        const double v = tv_[i];
        if (v <= 0.0) continue;
        double dy, dw;
        lagrange_d1d2(&tv_[i - 2], &tw_[i - 2], v, dw, dy);
        (void)dy;
        const double w = tw_[i], y = ty_[i];
        const double res = -dw / (w * (1.0 + w * w)) - 0.5 * y / w + 0.5 * v - 1.0 / v;
        worst = std::max(worst, std::fabs(res));
    }
    return worst;
}

double ShrinkerProfile::max_vpp() const {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < y_.size(); ++i) m = std::max(m, vpp_[i]);
    return m;
}

ShrinkerProfile ShrinkerProfile::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("ShrinkerProfile::scaled: factor > 0");
    ShrinkerProfile p(*this);
    p.solution_ = (factor == 1.0) && solution_;
    for (auto& v : p.v_) v *= factor;
    for (auto& v : p.vp_) v *= factor;
    for (auto& v : p.vpp_) v *= factor;
    for (auto& v : p.tv_) v *= factor;
    for (auto& v : p.tw_) v /= factor;
    return p;
}

void ShrinkerProfile::write_csv(std::ostream& os) const {
    os << "y,v,vp,vpp\n";
    char buf[160];
    for (std::size_t i = 0; i < y_.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", y_[i], v_[i], vp_[i],
                      vpp_[i]);
        os << buf;
    }
    std::snprintf(buf, sizeof(buf), "# a=%.17g v0=%.17g vp0=%.3e fd_residual_sup=%.3e\n", a_,
                  v_.front(), vp_.front(), fd_residual_sup());
    os << buf;
}

}  // namespace bslab
