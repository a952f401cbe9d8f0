#include "bslab/model_surface.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace bslab {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// 4th-order centered first/second derivative weights on a 5-point stencil.
void stencil_d1(const std::array<double, 5>& f, double h, double& d1) {
    d1 = (f[0] - 8.0 * f[1] + 8.0 * f[3] - f[4]) / (12.0 * h);
}
void stencil_d2(const std::array<double, 5>& f, double h, double& d2) {
    d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
}

// Generalized cross product of three 4-vectors.
std::array<double, 4> cross4(const std::array<double, 4>& a, const std::array<double, 4>& b,
                             const std::array<double, 4>& c) {
    auto det3 = [](double a0, double a1, double a2, double b0, double b1, double b2, double c0,
                   double c1, double c2) {
        return a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0);
    };
    std::array<double, 4> n;
    n[0] = det3(a[1], a[2], a[3], b[1], b[2], b[3], c[1], c[2], c[3]);
    n[1] = -det3(a[0], a[2], a[3], b[0], b[2], b[3], c[0], c[2], c[3]);
    n[2] = det3(a[0], a[1], a[3], b[0], b[1], b[3], c[0], c[1], c[3]);
    n[3] = -det3(a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2]);
    return n;
}

}  // namespace

ModelSurface ModelSurface::exact_cylinder() { return ModelSurface(GraphFn{}); }

ModelSurface ModelSurface::graph_over_cylinder(GraphFn ubar) {
    if (!ubar) throw std::invalid_argument("graph_over_cylinder: empty graph function");
    return ModelSurface(std::move(ubar));
}

double ModelSurface::radius(double x1, double x2, double phi, double t) const {
    const double root = std::sqrt(-t);
    double r = kSqrt2 * root;
    if (ubar_) {
        const double tau = -std::log(-t);
        r = root * (kSqrt2 + ubar_(x1 / root, x2 / root, phi, tau));
    }
    if (!(r > 0.0)) throw std::invalid_argument("ModelSurface: nonpositive radius at sample");
    return r;
}

std::array<double, 4> ModelSurface::position(double x1, double x2, double phi, double t) const {
    if (!(t < 0.0)) throw std::invalid_argument("ModelSurface: need t < 0");
    const double r = radius(x1, x2, phi, t);
    return {x1, x2, r * std::cos(phi), r * std::sin(phi)};
}

SurfaceGeometry ModelSurface::geometry(double x1, double x2, double phi, double t) const {
    if (!(t < 0.0)) throw std::invalid_argument("ModelSurface: need t < 0");
    SurfaceGeometry g;
    if (is_exact()) {
        const double r = std::sqrt(-2.0 * t);
        const double c = std::cos(phi), s = std::sin(phi);
        g.position = {x1, x2, r * c, r * s};
        g.normal = {0.0, 0.0, c, s};
        g.mean_curvature = 1.0 / r;
        g.second_fund_sq = 1.0 / (r * r);
        g.laplace_x = {0.0, 0.0, -c / r, -s / r};
        g.nu1 = 0.0;
        g.nu2 = 0.0;
        return g;
    }

    const double root = std::sqrt(-t);
    const double h[3] = {1e-3 * root, 1e-3 * root, 1e-3};
    // 5-point patch values of the parametrization along each axis plus the
    // diagonal points needed for mixed second derivatives.
    auto at = [&](double d1, double d2, double d3) { return position(x1 + d1, x2 + d2, phi + d3, t); };

    std::array<double, 4> e[3];     // tangents
    std::array<double, 4> dd[3][3];  // second derivatives of p
    const std::array<double, 4> pc = at(0, 0, 0);

    for (int a = 0; a < 3; ++a) {
        std::array<std::array<double, 4>, 5> line;
        for (int s5 = -2; s5 <= 2; ++s5) {
            double d[3] = {0, 0, 0};
            d[a] = s5 * h[a];
            line[s5 + 2] = at(d[0], d[1], d[2]);
        }
        for (int i = 0; i < 4; ++i) {
            std::array<double, 5> comp;
            for (int s5 = 0; s5 < 5; ++s5) comp[s5] = line[s5][i];
            stencil_d1(comp, h[a], e[a][i]);
            stencil_d2(comp, h[a], dd[a][a][i]);
        }
    }
    // Mixed second derivatives via 4th-order cross stencil: apply d1 along axis
    // b to d1-along-a values.
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            std::array<std::array<double, 4>, 5> da_line;
            for (int sb = -2; sb <= 2; ++sb) {
                std::array<std::array<double, 4>, 5> line;
                for (int sa = -2; sa <= 2; ++sa) {
                    double d[3] = {0, 0, 0};
                    d[a] = sa * h[a];
                    d[b] = sb * h[b];
                    line[sa + 2] = at(d[0], d[1], d[2]);
                }
                for (int i = 0; i < 4; ++i) {
                    std::array<double, 5> comp;
                    for (int sa = 0; sa < 5; ++sa) comp[sa] = line[sa][i];
                    stencil_d1(comp, h[a], da_line[sb + 2][i]);
                }
            }
            for (int i = 0; i < 4; ++i) {
                std::array<double, 5> comp;
                for (int sb = 0; sb < 5; ++sb) comp[sb] = da_line[sb][i];
                stencil_d1(comp, h[b], dd[a][b][i]);
            }
            dd[b][a] = dd[a][b];
        }

    // Metric and inverse.
    Eigen::Matrix3d met;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double s = 0;
            for (int i = 0; i < 4; ++i) s += e[a][i] * e[b][i];
            met(a, b) = s;
        }
    const Eigen::Matrix3d ginv = met.inverse();

    // Outward unit normal.
    std::array<double, 4> n = cross4(e[0], e[1], e[2]);
    double nn = 0;
    for (double c : n) nn += c * c;
    nn = std::sqrt(nn);
    for (auto& c : n) c /= nn;
    const double radial = n[2] * std::cos(phi) + n[3] * std::sin(phi);
    if (radial < 0.0)
        for (auto& c : n) c = -c;

    // Second fundamental form A_ab = -<dd p, n> (so the shrinking cylinder has
    // H = +1/r), mean curvature H = g^{ab} A_ab, |A|^2 = g^{ac} g^{bd} A_ab A_cd.
    Eigen::Matrix3d A;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double s = 0;
            for (int i = 0; i < 4; ++i) s += dd[a][b][i] * n[i];
            A(a, b) = -s;
        }
    const double H = (ginv * A).trace();
    const Eigen::Matrix3d shape = ginv * A;
    const double A2 = (shape * shape).trace();

    g.position = pc;
    g.normal = n;
    g.mean_curvature = H;
    g.second_fund_sq = A2;
    // Mean curvature vector: tangential projection removed from g^{ab} dd_ab.
    for (int i = 0; i < 4; ++i) {
        double tr = 0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) tr += ginv(a, b) * dd[a][b][i];
        g.laplace_x[i] = tr;
    }
    // Remove tangential components: laplace_x = (g^{ab} dd_ab)^perp = -H n.
    double tang[3];
    for (int a = 0; a < 3; ++a) {
        double s = 0;
        for (int i = 0; i < 4; ++i) s += g.laplace_x[i] * e[a][i];
        tang[a] = s;
    }
    Eigen::Vector3d proj = ginv * Eigen::Vector3d(tang[0], tang[1], tang[2]);
    for (int i = 0; i < 4; ++i)
        for (int a = 0; a < 3; ++a) g.laplace_x[i] -= proj(a) * e[a][i];

    g.nu1 = n[0];
    g.nu2 = n[1];
    return g;
}

double ModelSurface::laplace_beltrami(
    double x1, double x2, double phi, double t,
    const std::function<double(const std::array<double, 4>&)>& g) const {
    const double root = std::sqrt(-t);
    const double h[3] = {1e-2 * root, 1e-2 * root, 1e-2};

    // Composite scalar on the parameter patch.
    auto gval = [&](double d1, double d2, double d3) {
        return g(position(x1 + d1, x2 + d2, phi + d3, t));
    };

    std::array<double, 3> dg;
    std::array<std::array<double, 3>, 3> hess;
    for (int a = 0; a < 3; ++a) {
        std::array<double, 5> line;
        for (int s5 = -2; s5 <= 2; ++s5) {
            double d[3] = {0, 0, 0};
            d[a] = s5 * h[a];
            line[s5 + 2] = gval(d[0], d[1], d[2]);
        }
        stencil_d1(line, h[a], dg[a]);
        stencil_d2(line, h[a], hess[a][a]);
    }
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            std::array<double, 5> dline;
            for (int sb = -2; sb <= 2; ++sb) {
                std::array<double, 5> line;
                for (int sa = -2; sa <= 2; ++sa) {
                    double d[3] = {0, 0, 0};
                    d[a] = sa * h[a];
                    d[b] = sb * h[b];
                    line[sa + 2] = gval(d[0], d[1], d[2]);
                }
                stencil_d1(line, h[a], dline[sb + 2]);
            }
            stencil_d1(dline, h[b], hess[a][b]);
            hess[b][a] = hess[a][b];
        }

    // Metric from tangents of the parametrization.
    std::array<std::array<double, 4>, 3> e;
    for (int a = 0; a < 3; ++a) {
        std::array<std::array<double, 4>, 5> line;
        for (int s5 = -2; s5 <= 2; ++s5) {
            double d[3] = {0, 0, 0};
            d[a] = s5 * h[a];
            line[s5 + 2] = position(x1 + d[0], x2 + d[1], phi + d[2], t);
        }
        for (int i = 0; i < 4; ++i) {
            std::array<double, 5> comp;
            for (int s5 = 0; s5 < 5; ++s5) comp[s5] = line[s5][i];
            stencil_d1(comp, h[a], e[a][i]);
        }
    }
    Eigen::Matrix3d met;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double s = 0;
            for (int i = 0; i < 4; ++i) s += e[a][i] * e[b][i];
            met(a, b) = s;
        }
    const Eigen::Matrix3d ginv = met.inverse();

    // Christoffel contraction: Delta g = g^{ab} (d_ab g - Gamma^c_ab d_c g),
    // with g^{ab} Gamma^c_ab recovered from the mean curvature vector identity
    // g^{ab} dd_ab = (Delta x) + g^{ab} Gamma^c_ab e_c.
    // Using the scalar hessian directly:
    double lap = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) lap += ginv(a, b) * hess[a][b];

    // Subtract g^{ab} Gamma^c_ab d_c g. The contracted Christoffel equals the
    // tangential part of g^{ab} dd_ab expressed in the frame e_c.
    std::array<std::array<std::array<double, 4>, 3>, 3> dd;
    for (int a = 0; a < 3; ++a) {
        std::array<std::array<double, 4>, 5> line;
        for (int s5 = -2; s5 <= 2; ++s5) {
            double d[3] = {0, 0, 0};
            d[a] = s5 * h[a];
            line[s5 + 2] = position(x1 + d[0], x2 + d[1], phi + d[2], t);
        }
        for (int i = 0; i < 4; ++i) {
            std::array<double, 5> comp;
            for (int s5 = 0; s5 < 5; ++s5) comp[s5] = line[s5][i];
            stencil_d2(comp, h[a], dd[a][a][i]);
        }
    }
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            std::array<std::array<double, 4>, 5> da_line;
            for (int sb = -2; sb <= 2; ++sb) {
                std::array<std::array<double, 4>, 5> line;
                for (int sa = -2; sa <= 2; ++sa) {
                    double d[3] = {0, 0, 0};
                    d[a] = sa * h[a];
                    d[b] = sb * h[b];
                    line[sa + 2] = position(x1 + d[0], x2 + d[1], phi + d[2], t);
                }
                for (int i = 0; i < 4; ++i) {
                    std::array<double, 5> comp;
                    for (int sa = 0; sa < 5; ++sa) comp[sa] = line[sa][i];
                    stencil_d1(comp, h[a], da_line[sb + 2][i]);
                }
            }
            for (int i = 0; i < 4; ++i) {
                std::array<double, 5> comp;
                for (int sb = 0; sb < 5; ++sb) comp[sb] = da_line[sb][i];
                stencil_d1(comp, h[b], dd[a][b][i]);
            }
            dd[b][a] = dd[a][b];
        }

    std::array<double, 4> contracted{};
    for (int i = 0; i < 4; ++i)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) contracted[i] += ginv(a, b) * dd[a][b][i];
    // Tangential coefficients of the contracted second derivative.
    double tang[3];
    for (int a = 0; a < 3; ++a) {
        double s = 0;
        for (int i = 0; i < 4; ++i) s += contracted[i] * e[a][i];
        tang[a] = s;
    }
    Eigen::Vector3d coef = ginv * Eigen::Vector3d(tang[0], tang[1], tang[2]);
    for (int a = 0; a < 3; ++a) lap -= coef(a) * dg[a];
    return lap;
}

}  // namespace bslab
