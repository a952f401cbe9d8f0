#include "bslab/comparison.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace bslab {

AnisoDistance::AnisoDistance(double alpha_in, double beta_in) : alpha(alpha_in), beta(beta_in) {
    if (!(beta > 0.0) || !(beta <= 1e-3))
        throw std::invalid_argument("AnisoDistance: beta outside (0, 1e-3]");
    if (!(alpha > 0.0) || !(alpha <= beta * beta + 1e-18))
        throw std::invalid_argument("AnisoDistance: alpha outside (0, beta^2]");
}

double AnisoDistance::value(double x1, double x2, double t) const {
    const double at = std::fabs(t);
    return alpha * x1 * x1 / at + x2 * x2 / ((2.0 - beta) * at);
}

double AnisoDistance::dt(double x1, double x2, double t) const {
    // d/dt of 1/|t| for t < 0 is 1/t^2 = 1/|t|^2.
    return value(x1, x2, t) / std::fabs(t);
}

std::array<double, 4> AnisoDistance::gradient(double x1, double x2, double t) const {
    const double at = std::fabs(t);
    return {2.0 * alpha * x1 / at, 2.0 * x2 / ((2.0 - beta) * at), 0.0, 0.0};
}

std::array<double, 4> AnisoDistance::hessian_diag(double x1, double x2, double t) const {
    (void)x1;
    (void)x2;
    const double at = std::fabs(t);
    return {2.0 * alpha / at, 2.0 / ((2.0 - beta) * at), 0.0, 0.0};
}

double AnisoDistance::r_alpha(double y1, double y2) const {
    return std::sqrt(alpha * y1 * y1 + y2 * y2 / (2.0 - beta));
}

void CheckReport::write_csv(std::ostream& os) const {
    os << "x1,x2,t,residual,verdict\n";
    char buf[192];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%s\n", s.x[0], s.x[1], s.t,
                      s.residual, s.included ? (s.residual >= 0 ? "ok" : "neg") : "skipped");
        os << buf;
    }
}

namespace {

// For material points moving with velocity -H nu the curvature terms cancel,
// leaving (d_t - Lap_M) F = d_t^explicit F - sum_i (1 - nu_i^2) d2F_ii for the
// diagonal ambient Hessians used here.
double tangential_grad_sq(const std::array<double, 4>& grad, const std::array<double, 4>& nu) {
    double g2 = 0.0, gn = 0.0;
    for (int i = 0; i < 4; ++i) {
        g2 += grad[i] * grad[i];
        gn += grad[i] * nu[i];
    }
    return g2 - gn * gn;
}

}  // namespace

CheckReport check_aniso_evolution(const ModelSurface& m, const AnisoDistance& dist,
                                  const std::vector<SurfacePoint>& samples, double tol) {
    CheckReport rep;
    rep.name = "aniso-evolution";
    rep.min_residual = std::numeric_limits<double>::infinity();
    const double c1 = dist.alpha, c2 = 1.0 / (2.0 - dist.beta);
    for (const auto& sp : samples) {
        ++rep.total;
        CheckSample out;
        out.t = sp.t;
        SurfaceGeometry g;
        try {
            g = m.geometry(sp.x1, sp.x2, sp.phi, sp.t);
        } catch (const std::exception& e) {
            out.included = false;
            out.note = e.what();
            ++rep.excluded;
            rep.samples.push_back(out);
            continue;
        }
        out.x = g.position;
        const double at = std::fabs(sp.t);
        const double x1 = g.position[0], x2 = g.position[1];
        const double f1 = x1 * x1 / at, f2v = x2 * x2 / at;
        const double fa = c1 * f1 + c2 * f2v;

        // |t| (d_t - Lap) f_alpha = sum_i c_i (f_i - 2 (1 - nu_i^2)).
        const double lhs_evol =
            c1 * (f1 - 2.0 * (1.0 - g.nu1 * g.nu1)) + c2 * (f2v - 2.0 * (1.0 - g.nu2 * g.nu2));
        const double slack_evol = lhs_evol - (fa - 2.0);

        // |t| |grad f_alpha|^2 <= (16 - 4 beta) f_alpha / (8 - 7 beta).
        const auto grad = dist.gradient(x1, x2, sp.t);
        const double g2 = tangential_grad_sq(grad, g.normal);
        const double slack_grad =
            (16.0 - 4.0 * dist.beta) * fa / (8.0 - 7.0 * dist.beta) - at * g2;

        out.residual = std::min(slack_evol, slack_grad);
        rep.min_residual = std::min(rep.min_residual, out.residual);
        rep.samples.push_back(out);
    }
    rep.pass = rep.min_residual >= -tol;
    return rep;
}

HeatBarrier HeatBarrier::psi_b(double b, double zhat) {
    if (!(b >= 2.0) || !(b <= 7.0)) throw std::invalid_argument("HeatBarrier: b outside [2, 7]");
    if (!(zhat >= 1.0)) throw std::invalid_argument("HeatBarrier: need zhat >= 1");
    HeatBarrier h;
    h.kind = SupersolutionKind::PsiB;
    h.b = b;
    h.zhat = zhat;
    return h;
}

HeatBarrier HeatBarrier::phi_delta(double delta) {
    if (!(delta > 0.0) || !(delta < 0.5))
        throw std::invalid_argument("HeatBarrier: delta outside (0, 1/2)");
    HeatBarrier h;
    h.kind = SupersolutionKind::PhiDelta;
    h.delta = delta;
    return h;
}

double HeatBarrier::exponent(double x1, double t) const {
    const double at = std::fabs(t);
    if (kind == SupersolutionKind::PsiB) {
        const double l = std::log(at) - 2.0 * std::log(zhat);
        return x1 * x1 / (4.0 * at) - std::pow(l, 2.0 * b);
    }
    const double l = std::log(at);
    return delta * delta * x1 * x1 / at - 100.0 * l * l;
}

double HeatBarrier::value(double x1, double t) const { return std::exp(exponent(x1, t)); }

double HeatBarrier::dt_over_value(double x1, double t) const {
    const double at = std::fabs(t);
    if (kind == SupersolutionKind::PsiB) {
        const double l = std::log(at) - 2.0 * std::log(zhat);
        // d/dt with t < 0: d|t|/dt = -1.
        return x1 * x1 / (4.0 * at * at) + 2.0 * b * std::pow(l, 2.0 * b - 1.0) / at;
    }
    const double l = std::log(at);
    return delta * delta * x1 * x1 / (at * at) + 200.0 * l / at;
}

double HeatBarrier::dx_over_value(double x1, double t) const {
    const double at = std::fabs(t);
    return (kind == SupersolutionKind::PsiB) ? x1 / (2.0 * at) : 2.0 * delta * delta * x1 / at;
}

double HeatBarrier::dxx_over_value(double x1, double t) const {
    const double at = std::fabs(t);
    const double gx = dx_over_value(x1, t);
    const double gxx = (kind == SupersolutionKind::PsiB) ? 1.0 / (2.0 * at)
                                                          : 2.0 * delta * delta / at;
    return gxx + gx * gx;
}

bool HeatBarrier::in_region(double x1, double t) const {
    const double at = std::fabs(t);
    if (kind == SupersolutionKind::PsiB) {
        const double l = std::log(at) - 2.0 * std::log(zhat);
        if (l <= 1.0) return false;
        return std::fabs(x1) / std::sqrt(at) <= 2.0 * std::pow(l, b);
    }
    return std::log(at) > 1.0;
}

CheckReport check_jacobi_supersolution(const HeatBarrier& barrier, const ModelSurface& m,
                                       const std::vector<SurfacePoint>& samples) {
    CheckReport rep;
    rep.name = (barrier.kind == SupersolutionKind::PsiB) ? "jacobi-psi_b" : "jacobi-phi_delta";
    rep.min_residual = std::numeric_limits<double>::infinity();
    for (const auto& sp : samples) {
        ++rep.total;
        CheckSample out;
        out.t = sp.t;
        SurfaceGeometry g = m.geometry(sp.x1, sp.x2, sp.phi, sp.t);
        out.x = g.position;
        const double x1 = g.position[0];
        if (!barrier.in_region(x1, sp.t)) {
            out.included = false;
            out.note = "outside region";
            ++rep.excluded;
            rep.samples.push_back(out);
            continue;
        }
        // (d_t - Lap - |A|^2) F / F with F = F(x1, t):
        //   dt/F - (1 - nu1^2) Fxx/F - |A|^2.
        const double res = barrier.dt_over_value(x1, sp.t) -
                           (1.0 - g.nu1 * g.nu1) * barrier.dxx_over_value(x1, sp.t) -
                           g.second_fund_sq;
        out.residual = res;
        rep.min_residual = std::min(rep.min_residual, res);
        rep.samples.push_back(out);
    }
    rep.pass = rep.excluded < rep.total && rep.min_residual > 0.0;
    return rep;
}

RegularizedSlopeResult regularized_slope(const ModelSurface& m, const AnisoDistance& dist,
                                         const std::vector<SurfacePoint>& samples, double eps,
                                         double zhat) {
    if (!(eps >= 0.0)) throw std::invalid_argument("regularized_slope: eps must be >= 0");
    RegularizedSlopeResult result;
    result.zeta_check.name = "zeta-supersolution";
    result.zeta_check.min_residual = std::numeric_limits<double>::infinity();

    for (const auto& sp : samples) {
        SurfaceGeometry g = m.geometry(sp.x1, sp.x2, sp.phi, sp.t);
        const double at = std::fabs(sp.t);
        const double x1 = g.position[0], x2 = g.position[1];
        const double fa = dist.value(x1, x2, sp.t);
        // (|nu1| - eps zeta)_+ computed through logs so huge f_alpha cannot
        // overflow: the subtrahend only matters when it is <= |nu1| <= 1.
        const double log_sub = std::log(std::max(eps, 1e-300)) + 0.25 * fa;
        double nu1eps = 0.0;
        if (std::fabs(g.nu1) > 0.0 && log_sub < std::log(std::fabs(g.nu1)))
            nu1eps = std::fabs(g.nu1) - std::exp(log_sub);
        if (eps == 0.0) nu1eps = std::fabs(g.nu1);
        result.nu1_eps.push_back(nu1eps);

        CheckSample out;
        out.x = g.position;
        out.t = sp.t;
        ++result.zeta_check.total;

        // Curvature a priori assumption.
        if (g.second_fund_sq > 5.0 / (dist.beta * at)) {
            out.included = false;
            out.note = "curvature assumption violated";
            ++result.zeta_check.excluded;
            result.zeta_check.samples.push_back(out);
            continue;
        }
        const double upper = std::log(at) - 2.0 * std::log(zhat);
        if (!(nu1eps > 0.0) || fa < 60.0 / dist.beta || fa > upper) {
            out.included = false;
            out.note = "outside region";
            ++result.zeta_check.excluded;
            result.zeta_check.samples.push_back(out);
            continue;
        }

        // (d_t - Lap - |A|^2) zeta / zeta
        //   = (1/4)[(d_t - Lap) f_alpha - (1/4)|grad f_alpha|^2] - |A|^2.
        const double f1 = x1 * x1 / at, f2v = x2 * x2 / at;
        const double c1 = dist.alpha, c2 = 1.0 / (2.0 - dist.beta);
        const double evol = (c1 * (f1 - 2.0 * (1.0 - g.nu1 * g.nu1)) +
                             c2 * (f2v - 2.0 * (1.0 - g.nu2 * g.nu2))) /
                            at;
        const double grad_sq = tangential_grad_sq(dist.gradient(x1, x2, sp.t), g.normal);
        const double res = 0.25 * (evol - 0.25 * grad_sq) - g.second_fund_sq;
        out.residual = res;
        result.zeta_check.min_residual = std::min(result.zeta_check.min_residual, res);
        result.zeta_check.samples.push_back(out);
    }
    result.zeta_check.pass = result.zeta_check.min_residual >= 0.0;
    return result;
}

double zeta_supersolution_scaled(const AnisoDistance& dist, double f1, double f2, double nu1,
                                 double nu2, double a2_times_t) {
    const double c1 = dist.alpha, c2 = 1.0 / (2.0 - dist.beta);
    const double evol =
        c1 * (f1 - 2.0 * (1.0 - nu1 * nu1)) + c2 * (f2 - 2.0 * (1.0 - nu2 * nu2));
    // |t| |grad^M f_alpha|^2 with the tangential projection of the ambient
    // gradient (2 c1 x1, 2 c2 x2, 0, 0) / |t|.
    const double g1 = 2.0 * c1 * std::sqrt(std::max(0.0, f1));
    const double g2 = 2.0 * c2 * std::sqrt(std::max(0.0, f2));
    const double gn = g1 * nu1 + g2 * nu2;
    const double grad_sq = g1 * g1 + g2 * g2 - gn * gn;
    return 0.25 * (evol - 0.25 * grad_sq) - a2_times_t;
}

std::array<double, 3> dirichlet_heat(double x, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("dirichlet_heat: need t > 0");
    if (!(x >= 0.0)) throw std::invalid_argument("dirichlet_heat: need x >= 0");
    const double s = x / (2.0 * std::sqrt(t));
    const double psi = std::erf(s);
    const double psix = std::exp(-s * s) / std::sqrt(std::acos(-1.0) * t);
    const double psixx = -x / (2.0 * t) * psix;
    return {psi, psix, psixx};
}

}  // namespace bslab
