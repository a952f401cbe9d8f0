#include "bslab/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace bslab {

BarrierSurface::BarrierSurface(double a1, double a2, double L,
                               std::shared_ptr<const ShrinkerProfile> profile)
    : a1_(a1), a2_(a2), L_(L), profile_(std::move(profile)) {
    if (!(a1 >= a2)) throw std::invalid_argument("BarrierSurface: need a1 >= a2");
    if (!(L >= 1.0) || !(L < a2 - 1.0))
        throw std::invalid_argument("BarrierSurface: need 1 <= L < a2 - 1");
    rho_max_ = profile_->value(L_ - 1.0);

    // Coordinate extrema over a fine sweep of the full parameter range,
    // including the tip ring r = a2 where the profile vanishes.
    max_y1_ = 0.0;
    max_y2_ = 0.0;
    const std::size_t n = 4000;
    for (std::size_t i = 0; i <= n; ++i) {
        const double r = L_ + (a2_ - L_) * static_cast<double>(i) / n;
        max_y1_ = std::max(max_y1_, lambda() * r);  // theta = 0
        max_y2_ = std::max(max_y2_, r);             // theta = pi/2
    }
}

double BarrierSurface::profile_inverse(double rho) const {
    if (rho < 0.0 || rho > rho_max_ * (1.0 + 1e-12))
        throw std::invalid_argument("BarrierSurface: rho outside the outer branch");
    double lo = L_ - 1.0, hi = a2_ - 1.0;
    // v is strictly decreasing on the branch; bisect, then one Newton polish.
    for (int it = 0; it < 80 && hi - lo > 1e-14 * a2_; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (profile_->value(mid) > rho)
            lo = mid;
        else
            hi = mid;
    }
    double y = 0.5 * (lo + hi);
    const auto e = profile_->evaluate(y);
    if (std::isfinite(e[1]) && e[1] < -1e-12) {
        const double corr = (e[0] - rho) / e[1];
        const double yn = y - corr;
        if (yn > L_ - 1.0 - 1e-9 && yn < a2_ - 1.0) y = yn;
    }
    return y;
}

double BarrierSurface::graph(double y2, double rho) const {
    const double r = 1.0 + profile_inverse(rho);
    const double arg = r * r - y2 * y2;
    if (arg <= 0.0) throw std::invalid_argument("BarrierSurface: sample off the graph half");
    return std::sqrt(arg);
}

BarrierSurface build_barrier(double a1, double a2, double L) {
    auto profile = std::make_shared<const ShrinkerProfile>(solve_shrinker(a2 - 1.0));
    return BarrierSurface(a1, a2, L, std::move(profile));
}

namespace {

// 4th-order first/second derivative from 5 uniformly spaced values.
double fd1(const std::array<double, 5>& f, double h) {
    return (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
}
double fd2(const std::array<double, 5>& f, double h) {
    return (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
}

}  // namespace

BarrierReport verify_inner_barrier(const BarrierSurface& b, std::size_t n_r, std::size_t n_theta,
                                   std::optional<double> lambda_override, double tol) {
    const double lam = lambda_override.value_or(b.lambda());
    if (lam < 1.0 - 1e-12)
        throw std::invalid_argument("verify_inner_barrier: scaling factor must be >= 1");

    BarrierReport rep;
    rep.min_residual = std::numeric_limits<double>::infinity();
    rep.min_scaled_residual = std::numeric_limits<double>::infinity();

    const double collar = 0.1;            // excluded ring around r = L
    const double tip_gap = 0.05 * b.a2(); // excluded band before the tip ring
    const double r_lo = b.L() + collar;
    const double r_hi = b.a2() - tip_gap;
    const double theta_lim = 0.98 * std::acos(-1.0) / 2.0;

    for (std::size_t ir = 0; ir < n_r; ++ir) {
        // Clustered toward both ends of the r-range.
        const double s = static_cast<double>(ir) / (n_r - 1);
        const double cluster = 0.5 * (1.0 - std::cos(s * std::acos(-1.0)));
        const double r = r_lo + (r_hi - r_lo) * cluster;
        const double rho = b.profile().value(r - 1.0);
        for (std::size_t it = 0; it < n_theta; ++it) {
            const double theta =
                -theta_lim + 2.0 * theta_lim * static_cast<double>(it) / (n_theta - 1);
            const double y2 = r * std::sin(theta);

            BarrierSample sample{r, theta, 0.0, 0.0, true};
            ++rep.total;

            // Finite-difference patch in (y2, rho), with steps tied to the
            // local graph scales F/|F_y2| = F^2/|y2| and F/|F_rho| =
            // F^2 |v'|/r; the graph turns vertical toward the rim in both
            // directions and fixed steps lose the cancellation there.
            double fc;
            try {
                fc = b.graph(y2, rho);
            } catch (const std::exception&) {
                sample.included = false;
                ++rep.excluded;
                rep.samples.push_back(sample);
                continue;
            }
            const double vp = b.profile().evaluate(r - 1.0)[1];
            const double h2 = std::clamp(0.005 * fc * fc / std::max(std::fabs(y2), 1.0),
                                         1e-7 * (1.0 + r), 1e-4 * (1.0 + r));
            const double hr =
                std::clamp(0.005 * fc * fc * std::fabs(vp) / r, 1e-9 * (1.0 + rho),
                           1e-4 * (1.0 + rho));
            if (rho - 2.0 * hr <= 0.0 || rho + 2.0 * hr >= b.rho_max()) {
                sample.included = false;
                ++rep.excluded;
                rep.samples.push_back(sample);
                continue;
            }
            bool ok = true;
            std::array<std::array<double, 5>, 5> F{};
            for (int i2 = -2; i2 <= 2 && ok; ++i2)
                for (int irho = -2; irho <= 2 && ok; ++irho) {
                    try {
                        F[i2 + 2][irho + 2] = b.graph(y2 + i2 * h2, rho + irho * hr);
                    } catch (const std::exception&) {
                        ok = false;
                    }
                }
            if (!ok || F[2][2] < 0.05) {
                sample.included = false;
                ++rep.excluded;
                rep.samples.push_back(sample);
                continue;
            }

            std::array<double, 5> line2, liner;
            for (int i = 0; i < 5; ++i) {
                line2[i] = F[i][2];
                liner[i] = F[2][i];
            }
            const double F2 = fd1(line2, h2), F22 = fd2(line2, h2);
            const double Fr = fd1(liner, hr), Frr = fd2(liner, hr);
            std::array<double, 5> cross;
            for (int i = 0; i < 5; ++i) {
                std::array<double, 5> col;
                for (int j = 0; j < 5; ++j) col[j] = F[j][i];
                cross[i] = fd1(col, h2);
            }
            const double F2r = fd1(cross, hr);

            // Axisymmetric reduction over (y3, y4): f = lam * F(y2, rho).
            const double f = lam * F[2][2];
            const double f2 = lam * F2, fr = lam * Fr;
            const double f22 = lam * F22, frr = lam * Frr, f2r = lam * F2r;
            const double grad_sq = f2 * f2 + fr * fr;
            const double laplace = f22 + frr + fr / rho;
            const double hess_term =
                (f22 * f2 * f2 + 2.0 * f2r * f2 * fr + frr * fr * fr) / (1.0 + grad_sq);
            const double radial_term = 0.5 * (f - y2 * f2 - rho * fr);
            const double residual = laplace - hess_term + radial_term;

            sample.residual = residual;
            sample.grad_sq = grad_sq;
            rep.samples.push_back(sample);
            const double scale = (1.0 + grad_sq) * (1.0 + std::fabs(f));
            rep.min_residual = std::min(rep.min_residual, residual);
            rep.min_scaled_residual = std::min(rep.min_scaled_residual, residual / scale);
        }
    }
    rep.pass = rep.min_scaled_residual >= -tol;
    return rep;
}

void BarrierReport::write_csv(std::ostream& os) const {
    os << "r,theta,residual\n";
    char buf[128];
    for (const auto& s : samples) {
        if (!s.included) continue;
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", s.r, s.theta, s.residual);
        os << buf;
    }
}

EllipsoidalLowerBound::EllipsoidalLowerBound(double tau, double alpha, double delta, double zhat) {
    if (!(alpha > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("EllipsoidalLowerBound: need alpha, delta > 0");
    if (!(zhat >= 1.0)) throw std::invalid_argument("EllipsoidalLowerBound: need zhat >= 1");
    const double shifted = tau + 2.0 * std::log(zhat);
    if (!(shifted < 0.0))
        throw std::invalid_argument("EllipsoidalLowerBound: need tau + 2 log zhat < 0");
    alpha_ = alpha;
    delta_ = delta;
    denom_ = -shifted;
    domain_rhs_ = 2.0 * denom_ / (1.0 + delta_);
}

bool EllipsoidalLowerBound::in_domain(double y1, double y2) const {
    return alpha_ * alpha_ * y1 * y1 + y2 * y2 <= domain_rhs_ * (1.0 + 1e-14);
}

double EllipsoidalLowerBound::operator()(double y1, double y2) const {
    if (!in_domain(y1, y2))
        throw std::invalid_argument("EllipsoidalLowerBound: point outside the ellipsoidal domain");
    const double q = alpha_ * alpha_ * y1 * y1 + y2 * y2;
    const double radicand = std::max(0.0, 2.0 - (1.0 + delta_) * q / denom_);
    return std::sqrt(radicand) - std::sqrt(2.0);
}

}  // namespace bslab
