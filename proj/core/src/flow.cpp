#include "bslab/flow.hpp"

#include "bslab/smooth.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace bslab {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kMinRadius = 1e-3;
// Nonlinear terms are evaluated only on the numerically trusted core: beyond
// these per-axis bounds the unweighted collocation values of derivatives are
// dominated by amplified roundoff, and powers of them outgrow the Gaussian
// weight. The taper is smooth to keep the spectral representation clean.
constexpr double kTrustInner = 13.0;
constexpr double kTrustOuter = 15.5;

double trust_taper(double y1, double y2) {
    const double m = std::max(std::fabs(y1), std::fabs(y2));
    return 1.0 - smoothstep((m - kTrustInner) / (kTrustOuter - kTrustInner));
}
}  // namespace

void FlowParams::validate() const {
    if (!(beta > 0.0) || !(beta <= 1e-3))
        throw std::invalid_argument("FlowParams: beta outside (0, 1e-3]");
    if (!(L >= 1.0 / (beta * beta))) throw std::invalid_argument("FlowParams: need L >= 1/beta^2");
    if (!(dtau > 0.0) || !(dtau <= 0.1)) throw std::invalid_argument("FlowParams: bad dtau");
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("FlowParams: gamma outside (0, 1)");
    if (!(zhat >= 1.0)) throw std::invalid_argument("FlowParams: need zhat >= 1");
    if (!(freeze_radius > 2.0)) throw std::invalid_argument("FlowParams: freeze radius too small");
}

double graphical_radius(double tau, double zhat, std::optional<double> tau_s) {
    const double shifted = tau + 2.0 * std::log(zhat);
    if (!(shifted < 0.0)) throw std::invalid_argument("graphical_radius: need tau + 2log zhat < 0");
    const double base = std::sqrt(-shifted);
    if (!tau_s) return base;
    const double shifted_s = *tau_s + 2.0 * std::log(zhat);
    return lambda_switch(shifted / shifted_s) * base;
}

namespace {

// Nodal assembly of the nonlinear remainder N(u) = rhs - Lu from the field and
// its derivatives. Theta-derivative spans may be null (symmetric reduction);
// taper may be null (no masking).
void assemble_nonlinear(std::size_t n, const double* u, const double* u1, const double* u2,
                        const double* u11, const double* u12, const double* u22, const double* ut,
                        const double* u1t, const double* u2t, const double* utt,
                        const double* taper, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        if (taper && taper[i] == 0.0) {
            out[i] = 0.0;
            continue;
        }
        const double radius = kSqrt2 + u[i];
        const double rho = 1.0 / radius;
        const double vt = ut ? ut[i] : 0.0;
        const double vtt = utt ? utt[i] : 0.0;
        const double v1t = u1t ? u1t[i] : 0.0;
        const double v2t = u2t ? u2t[i] : 0.0;
        const double rho2 = rho * rho;
        const double rho3 = rho2 * rho;
        const double rho4 = rho2 * rho2;
        const double grad_sq = u1[i] * u1[i] + u2[i] * u2[i] + 0.5 * vt * vt;
        const double curved = rho * u[i] - 0.5 * rho2 * u[i] * u[i];
        const double q = 1.0 + grad_sq - vt * vt * curved;
        const double p = u1[i] * u1[i] * u11[i] + 2.0 * u1[i] * u2[i] * u12[i] +
                         u2[i] * u2[i] * u22[i] + rho4 * vt * vt * vtt +
                         2.0 * rho2 * (u1[i] * vt * v1t + u2[i] * vt * v2t) + rho3 * vt * vt;
        out[i] = -0.5 * rho * u[i] * u[i] - curved * vtt - p / q;
        if (taper) out[i] *= taper[i];
    }
}

std::vector<double> make_taper(const QuadratureGrid& g, bool theta_collapsed) {
    const std::size_t stride = theta_collapsed ? 1 : g.ntheta();
    std::vector<double> taper(g.n1() * g.n2() * stride);
    for (std::size_t i = 0; i < g.n1(); ++i)
        for (std::size_t j = 0; j < g.n2(); ++j) {
            const double m = trust_taper(g.nodes_y1()[i], g.nodes_y2()[j]);
            for (std::size_t k = 0; k < stride; ++k)
                taper[(i * g.n2() + j) * stride + k] = m;
        }
    return taper;
}

void require_radius(std::size_t n, const double* u) {
    for (std::size_t i = 0; i < n; ++i)
        if (!(kSqrt2 + u[i] > kMinRadius))
            throw std::runtime_error("flow: degenerate radius, sqrt(2) + u <= 1e-3");
}

}  // namespace

GridFunction rhs_profile(const GridFunction& u) {
    require_radius(u.values().size(), u.values().data());
    const GridFunction u1 = d_y1(u), u2 = d_y2(u), ut = d_theta(u);
    const GridFunction u11 = d2_y1(u), u22 = d2_y2(u), u12 = d2_y1y2(u);
    const GridFunction utt = d2_theta(u), u1t = d2_y1theta(u), u2t = d2_y2theta(u);

    GridFunction out = apply_ou(u, false);
    const std::vector<double> taper = make_taper(u.grid(), false);
    std::vector<double> nl(u.values().size());
    assemble_nonlinear(nl.size(), u.values().data(), u1.values().data(), u2.values().data(),
                       u11.values().data(), u12.values().data(), u22.values().data(),
                       ut.values().data(), u1t.values().data(), u2t.values().data(),
                       utt.values().data(), taper.data(), nl.data());
    for (std::size_t i = 0; i < nl.size(); ++i) out.mutable_values()[i] += nl[i];
    return out;
}

SlopeOperators slope_operators(const GridFunction& u) {
    require_radius(u.values().size(), u.values().data());
    const GridFunction u1 = d_y1(u), u2 = d_y2(u), ut = d_theta(u);
    const GridFunction u11 = d2_y1(u), u22 = d2_y2(u), u12 = d2_y1y2(u);
    const GridFunction utt = d2_theta(u), u1t = d2_y1theta(u), u2t = d2_y2theta(u);

    const std::size_t n = u.values().size();
    GridPtr grid = u.grid_ptr();
    SlopeOperators ops(grid);

    const std::vector<double> taper = make_taper(u.grid(), false);
    auto& fm = ops.f_multiplier.mutable_values();
    for (std::size_t i = 0; i < n; ++i) {
        const double mask = taper[i];
        const double uv = u.values()[i];
        const double v1 = u1.values()[i], v2 = u2.values()[i], vt = ut.values()[i];
        const double v11 = u11.values()[i], v12 = u12.values()[i], v22 = u22.values()[i];
        const double v1t = u1t.values()[i], v2t = u2t.values()[i], vtt = utt.values()[i];
        const double rho = 1.0 / (kSqrt2 + uv);
        const double rho2 = rho * rho, rho3 = rho2 * rho, rho4 = rho2 * rho2, rho5 = rho4 * rho;
        const double grad_sq = v1 * v1 + v2 * v2 + 0.5 * vt * vt;
        const double curved = rho * uv - 0.5 * rho2 * uv * uv;
        const double q = 1.0 + grad_sq - vt * vt * curved;
        const double p = v1 * v1 * v11 + 2.0 * v1 * v2 * v12 + v2 * v2 * v22 +
                         rho4 * vt * vt * vtt + 2.0 * rho2 * (v1 * vt * v1t + v2 * vt * v2t) +
                         rho3 * vt * vt;

        fm[i] = mask * (-curved - 2.0 * rho3 * vtt +
                        (4.0 * rho5 * vt * vt * vtt + 4.0 * rho3 * (v1 * v1t + v2 * v2t) * vt +
                         3.0 * rho4 * vt * vt) /
                            q -
                        2.0 * rho3 * p * vt * vt / (q * q));

        ops.e11.mutable_values()[i] = mask * v1 * v1 / q;
        ops.e12.mutable_values()[i] = mask * 2.0 * v1 * v2 / q;
        ops.e22.mutable_values()[i] = mask * v2 * v2 / q;
        ops.e1t.mutable_values()[i] = mask * 2.0 * rho2 * v1 * vt / q;
        ops.e2t.mutable_values()[i] = mask * 2.0 * rho2 * v2 * vt / q;
        ops.ett.mutable_values()[i] = mask * (curved + rho4 * vt * vt / q);
        ops.e1.mutable_values()[i] =
            mask *
            ((2.0 * (v1 * v11 + v2 * v12) + 2.0 * rho2 * vt * v1t) / q - 2.0 * p * v1 / (q * q));
        ops.e2.mutable_values()[i] =
            mask *
            ((2.0 * (v1 * v12 + v2 * v22) + 2.0 * rho2 * vt * v2t) / q - 2.0 * p * v2 / (q * q));
        ops.et.mutable_values()[i] =
            mask * ((2.0 * rho4 * vt * vtt + 2.0 * rho2 * (v1 * v1t + v2 * v2t) +
                     2.0 * rho3 * vt) /
                        q -
                    rho2 * p * vt / (q * q));
    }
    return ops;
}

GridFunction SlopeOperators::apply_e(const GridFunction& g) const {
    const GridFunction g1 = d_y1(g), g2 = d_y2(g), gt = d_theta(g);
    const GridFunction g11 = d2_y1(g), g22 = d2_y2(g), g12 = d2_y1y2(g);
    const GridFunction gtt = d2_theta(g), g1t = d2_y1theta(g), g2t = d2_y2theta(g);
    GridFunction out(g.grid_ptr());
    auto& o = out.mutable_values();
    for (std::size_t i = 0; i < o.size(); ++i) {
        o[i] = -(e11.values()[i] * g11.values()[i] + e12.values()[i] * g12.values()[i] +
                 e22.values()[i] * g22.values()[i] + e1t.values()[i] * g1t.values()[i] +
                 e2t.values()[i] * g2t.values()[i] + ett.values()[i] * gtt.values()[i] +
                 e1.values()[i] * g1.values()[i] + e2.values()[i] * g2.values()[i] +
                 et.values()[i] * gt.values()[i]);
    }
    return out;
}

void write_observables_csv_header(std::ostream& os) {
    os << "tau,alpha1,alpha2,alpha3,Wplus,W0,Wminus,aplus,omega\n";
}

void write_observables_csv_row(std::ostream& os, const SpectralReport& rep) {
    char buf[360];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", rep.tau,
                  rep.alpha[0], rep.alpha[1], rep.alpha[2], rep.w_plus, rep.w_zero, rep.w_minus,
                  rep.a_plus, rep.omega);
    os << buf;
}

FlowSim::FlowSim(GridPtr grid, FlowParams params, const GridFunction& u0, double tau0)
    : grid_(std::move(grid)), params_(std::move(params)), tau_(tau0) {
    params_.validate();
    if (!(tau0 + 2.0 * std::log(params_.zhat) < 0.0))
        throw std::invalid_argument("FlowSim: need tau0 + 2 log zhat < 0");

    const auto& g = *grid_;
    if (params_.theta_symmetric) {
        // Collapse theta: take the k = 0 slice and require exact symmetry.
        vals_.resize(g.n1() * g.n2());
        for (std::size_t i = 0; i < g.n1(); ++i)
            for (std::size_t j = 0; j < g.n2(); ++j) {
                const double v = u0(i, j, 0);
                for (std::size_t k = 1; k < g.ntheta(); ++k)
                    if (std::fabs(u0(i, j, k) - v) > 1e-14 * (1.0 + std::fabs(v)))
                        throw std::invalid_argument(
                            "FlowSim: theta_symmetric requested for theta-dependent data");
                vals_[i * g.n2() + j] = v;
            }
    } else {
        vals_ = u0.values();
    }
    init_vals_ = vals_;

    // Smooth freeze mask: 1 inside freeze_radius, 0 beyond radius + width.
    const std::size_t stride = params_.theta_symmetric ? 1 : g.ntheta();
    taper_ = make_taper(g, params_.theta_symmetric);

    // Quadrature weights in the state layout (theta collapsed when symmetric).
    {
        const std::size_t stride = params_.theta_symmetric ? 1 : g.ntheta();
        const double theta_total = params_.theta_symmetric
                                       ? g.weight_theta() * static_cast<double>(g.ntheta())
                                       : g.weight_theta();
        quad_weights_.resize(vals_.size());
        for (std::size_t i = 0; i < g.n1(); ++i)
            for (std::size_t j = 0; j < g.n2(); ++j) {
                const double w = g.measure_prefactor() * theta_total * g.weights_y1()[i] *
                                 g.weights_y2()[j];
                for (std::size_t k = 0; k < stride; ++k)
                    quad_weights_[(i * g.n2() + j) * stride + k] = w;
            }
    }
    if (params_.filter_unstable) {
        const std::size_t stride = params_.theta_symmetric ? 1 : g.ntheta();
        auto add_mode = [&](auto fn) {
            FilterMode mode;
            mode.values.resize(vals_.size());
            for (std::size_t i = 0; i < g.n1(); ++i)
                for (std::size_t j = 0; j < g.n2(); ++j)
                    for (std::size_t k = 0; k < stride; ++k)
                        mode.values[(i * g.n2() + j) * stride + k] =
                            fn(g.nodes_y1()[i], g.nodes_y2()[j],
                               params_.theta_symmetric ? 0.0 : g.nodes_theta()[k]);
            mode.norm_squared = 0.0;
            for (std::size_t n = 0; n < mode.values.size(); ++n)
                mode.norm_squared += quad_weights_[n] * mode.values[n] * mode.values[n];
            filter_modes_.push_back(std::move(mode));
        };
        add_mode([](double, double, double) { return 1.0; });
        add_mode([](double a, double, double) { return a; });
        add_mode([](double, double b, double) { return b; });
        if (!params_.theta_symmetric) {
            add_mode([](double, double, double t) { return std::cos(t); });
            add_mode([](double, double, double t) { return std::sin(t); });
        }
    }
    freeze_mask_.resize(vals_.size());
    for (std::size_t i = 0; i < g.n1(); ++i)
        for (std::size_t j = 0; j < g.n2(); ++j) {
            const double y1 = g.nodes_y1()[i], y2 = g.nodes_y2()[j];
            const double r = std::sqrt(y1 * y1 + y2 * y2);
            const double m = 1.0 - smoothstep((r - params_.freeze_radius) / params_.freeze_width);
            for (std::size_t k = 0; k < stride; ++k)
                freeze_mask_[(i * g.n2() + j) * stride + k] = m;
        }
    check_state(vals_);
}

void FlowSim::check_state(const std::vector<double>& vals) const {
    require_radius(vals.size(), vals.data());
    const double floor = params_.beta / 4.0;
    const double active =
        1.41 * graphical_radius(tau_, params_.zhat, params_.tau_s);
    const auto& g = *grid_;
    const std::size_t stride = params_.theta_symmetric ? 1 : g.ntheta();
    for (std::size_t i = 0; i < g.n1(); ++i)
        for (std::size_t j = 0; j < g.n2(); ++j) {
            const double y1 = g.nodes_y1()[i], y2 = g.nodes_y2()[j];
            if (y1 * y1 + y2 * y2 > active * active) continue;
            for (std::size_t k = 0; k < stride; ++k) {
                const double v = vals[(i * g.n2() + j) * stride + k];
                if (!std::isfinite(v)) throw std::runtime_error("flow: non-finite state value");
                if (!(kSqrt2 + v >= floor))
                    throw std::runtime_error("flow: graph radius below beta/4 on active domain");
            }
        }
}

void FlowSim::step_2d() {
    const auto& g = *grid_;
    const auto& ops = spectral_ops(grid_);
    const std::size_t n1 = g.n1(), n2 = g.n2();
    using Mat = RowMat;
    Eigen::Map<const Mat> U(vals_.data(), n1, n2);

    const Mat U1 = ops.d1_y1() * U;
    const Mat U2 = U * ops.d1_y2().transpose();
    const Mat U11 = ops.d2_y1() * U;
    const Mat U22 = U * ops.d2_y2().transpose();
    const Mat U12 = ops.d1_y1() * U * ops.d1_y2().transpose();

    std::vector<double> nl(vals_.size());
    assemble_nonlinear(nl.size(), vals_.data(), U1.data(), U2.data(), U11.data(), U12.data(),
                       U22.data(), nullptr, nullptr, nullptr, nullptr, taper_.data(), nl.data());

    // IMEX: coefficient space solve (1 - dtau mu)^(-1) (c + dtau c_N),
    // mu(m, n) = 1 - (m + n)/2.
    Eigen::Map<const Mat> N(nl.data(), n1, n2);
    Mat C = ops.fwd_y1() * U * ops.fwd_y2().transpose();
    const Mat CN = ops.fwd_y1() * N * ops.fwd_y2().transpose();
    const double dt = params_.dtau;
    for (std::size_t m = 0; m < n1; ++m)
        for (std::size_t nn = 0; nn < n2; ++nn) {
            const double mu = 1.0 - 0.5 * static_cast<double>(m + nn);
            C(m, nn) = (C(m, nn) + dt * CN(m, nn)) / (1.0 - dt * mu);
        }
    const Mat Unew = ops.inv_y1() * C * ops.inv_y2().transpose();
    for (std::size_t i = 0; i < vals_.size(); ++i) {
        const double blended =
            init_vals_[i] + freeze_mask_[i] * (Unew.data()[i] - init_vals_[i]);
        vals_[i] = blended;
    }
}

void FlowSim::step_3d() {
    const auto& g = *grid_;
    const auto& ops = spectral_ops(grid_);
    const std::size_t total = vals_.size();

    std::vector<double> u1(total), u2(total), ut(total), u11(total), u22(total), u12(total),
        utt(total), u1t(total), u2t(total), tmp(total);
    ops.apply_along_y1(ops.d1_y1(), vals_, u1);
    ops.apply_along_y2(ops.d1_y2(), vals_, u2);
    ops.apply_along_theta(ops.d1_theta(), vals_, ut);
    ops.apply_along_y1(ops.d2_y1(), vals_, u11);
    ops.apply_along_y2(ops.d2_y2(), vals_, u22);
    ops.apply_along_y2(ops.d1_y2(), u1, u12);
    ops.apply_along_theta(ops.d2_theta(), vals_, utt);
    ops.apply_along_theta(ops.d1_theta(), u1, u1t);
    ops.apply_along_theta(ops.d1_theta(), u2, u2t);

    // Explicit CFL guard for the theta diffusion carried in the nonlinearity.
    double max_curved = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        const double rho = 1.0 / (kSqrt2 + vals_[i]);
        max_curved =
            std::max(max_curved, std::fabs(rho * vals_[i] - 0.5 * rho * rho * vals_[i] * vals_[i]));
    }
    const double mmax = static_cast<double>(g.ntheta() / 2);
    if (params_.dtau * max_curved * mmax * mmax > 1.0)
        throw std::runtime_error("flow: explicit theta term violates the step-size restriction");

    std::vector<double> nl(total);
    assemble_nonlinear(total, vals_.data(), u1.data(), u2.data(), u11.data(), u12.data(),
                       u22.data(), ut.data(), u1t.data(), u2t.data(), utt.data(), taper_.data(),
                       nl.data());

    // Forward transforms.
    std::vector<double> c(total), cn(total);
    ops.apply_along_y1(ops.fwd_y1(), vals_, tmp);
    ops.apply_along_y2(ops.fwd_y2(), tmp, c);
    ops.apply_along_theta(ops.fwd_theta(), c, tmp);
    c.swap(tmp);
    ops.apply_along_y1(ops.fwd_y1(), nl, tmp);
    ops.apply_along_y2(ops.fwd_y2(), tmp, cn);
    ops.apply_along_theta(ops.fwd_theta(), cn, tmp);
    cn.swap(tmp);

    const double dt = params_.dtau;
    const auto& m2 = ops.theta_d2_diag();
    const std::size_t n2s = g.n2(), nth = g.ntheta();
    for (std::size_t m = 0; m < g.n1(); ++m)
        for (std::size_t nn = 0; nn < n2s; ++nn)
            for (std::size_t k = 0; k < nth; ++k) {
                const double mu = 1.0 - 0.5 * static_cast<double>(m + nn) + 0.5 * m2[k];
                const std::size_t idx = (m * n2s + nn) * nth + k;
                c[idx] = (c[idx] + dt * cn[idx]) / (1.0 - dt * mu);
            }

    ops.apply_along_theta(ops.inv_theta(), c, tmp);
    ops.apply_along_y2(ops.inv_y2(), tmp, c);
    ops.apply_along_y1(ops.inv_y1(), c, tmp);
    for (std::size_t i = 0; i < total; ++i)
        vals_[i] = init_vals_[i] + freeze_mask_[i] * (tmp[i] - init_vals_[i]);
}

void FlowSim::step() {
    if (params_.theta_symmetric)
        step_2d();
    else
        step_3d();
    for (const auto& mode : filter_modes_) {
        double inner = 0.0;
        for (std::size_t n = 0; n < vals_.size(); ++n)
            inner += quad_weights_[n] * mode.values[n] * vals_[n];
        const double c = inner / mode.norm_squared;
        for (std::size_t n = 0; n < vals_.size(); ++n) vals_[n] -= c * mode.values[n];
    }
    tau_ += params_.dtau;
    check_state(vals_);
}

void FlowSim::run_until(double tau_end) {
    while (tau_ + 0.5 * params_.dtau < tau_end) step();
}

GridFunction FlowSim::u() const {
    GridFunction out(grid_);
    const auto& g = *grid_;
    if (params_.theta_symmetric) {
        for (std::size_t i = 0; i < g.n1(); ++i)
            for (std::size_t j = 0; j < g.n2(); ++j)
                for (std::size_t k = 0; k < g.ntheta(); ++k)
                    out.mutable_values()[g.flat_index(i, j, k)] = vals_[i * g.n2() + j];
    } else {
        out.mutable_values() = vals_;
    }
    return out;
}

double FlowSim::min_radius_offset() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : vals_) m = std::min(m, kSqrt2 + v);
    return m;
}

SpectralReport FlowSim::observables() {
    SpectralReport rep;
    rep.tau = tau_;
    const double shifted = tau_ + 2.0 * std::log(params_.zhat);
    rep.rho = graphical_radius(tau_, params_.zhat, params_.tau_s);

    const GridFunction uf = u();
    const GridFunction uhat = cutoff_truncate(uf, std::pow(-shifted, params_.gamma));
    rep.alpha = spectral_coefficients(uhat);

    const GridFunction u1 = d_y1(uf);
    const auto& g = *grid_;
    GridFunction w(grid_);
    for (std::size_t i = 0; i < g.n1(); ++i)
        for (std::size_t j = 0; j < g.n2(); ++j) {
            const double y1 = g.nodes_y1()[i], y2 = g.nodes_y2()[j];
            const double e = eta_cutoff(std::sqrt(y1 * y1 + y2 * y2) / rep.rho);
            for (std::size_t k = 0; k < g.ntheta(); ++k) {
                const auto idx = g.flat_index(i, j, k);
                w.mutable_values()[idx] = e * u1.values()[idx];
            }
        }

    const auto& basis = spectral_basis(grid_);
    const auto& one = basis.unstable()[0];
    rep.a_plus = inner_product(w, one.phi);
    rep.w_plus = rep.a_plus * rep.a_plus / one.norm_squared;
    rep.w_zero = 0.0;
    for (const auto& phi : basis.neutral_shifted()) {
        const double c = inner_product(w, phi.phi);
        rep.w_zero += c * c / phi.norm_squared;
    }
    rep.w_minus = std::max(0.0, norm_sq(w) - rep.w_plus - rep.w_zero);

    // Running cutoff-error monitor: active until the switch time.
    const bool update = !params_.tau_s || tau_ <= *params_.tau_s;
    // Sup restricted to the unfrozen core; collocation amplification makes
    // pointwise derivative values meaningless toward the outermost nodes.
    const double scan = std::min(1.41 * (-shifted), params_.freeze_radius);
    if (update) omega_ = std::max(omega_, u1.sup_norm_within(scan));
    rep.omega = omega_;
    return rep;
}

}  // namespace bslab
