#include "bslab/spectral.hpp"

#include "bslab/smooth.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace bslab {

namespace {

// Weighted orthonormal polynomials psi_m = sqrt(w) phi_m for the weight
// exp(-y^2/4), phi_0 = 1/sqrt(m0) with m0 = 2 sqrt(pi):
//   psi_{m+1} = (y psi_m - sqrt(2m) psi_{m-1}) / sqrt(2(m+1)).
// Running the recurrence on the weighted values keeps every entry O(1); the
// raw phi values reach ~1/sqrt(w) at the extreme nodes and would poison the
// transform coefficients with cancellation noise.
Eigen::MatrixXd weighted_poly_values(const std::vector<double>& nodes,
                                     const std::vector<double>& weights, std::size_t nmax) {
    const std::size_t n = nodes.size();
    Eigen::MatrixXd psi(nmax, n);
    const double m0 = 2.0 * std::sqrt(std::acos(-1.0));
    for (std::size_t i = 0; i < n; ++i) {
        psi(0, i) = std::sqrt(weights[i] / m0);
        if (nmax > 1) psi(1, i) = nodes[i] * psi(0, i) / std::sqrt(2.0);
        for (std::size_t k = 2; k < nmax; ++k) {
            const double a = std::sqrt(2.0 * static_cast<double>(k));
            const double b = std::sqrt(2.0 * static_cast<double>(k - 1));
            psi(k, i) = (nodes[i] * psi(k - 1, i) - b * psi(k - 2, i)) / a;
        }
    }
    return psi;
}

void hermite_line_matrices(const std::vector<double>& nodes, const std::vector<double>& weights,
                           Eigen::MatrixXd& fwd, Eigen::MatrixXd& inv, Eigen::MatrixXd& d1,
                           Eigen::MatrixXd& d2, Eigen::MatrixXd& ou) {
    const std::size_t n = nodes.size();
    for (double w : weights)
        if (!(w > 0.0))
            throw std::invalid_argument("hermite_line_matrices: weight underflow; reduce N");
    const Eigen::MatrixXd psi = weighted_poly_values(nodes, weights, n);

    fwd.resize(n, n);
    inv.resize(n, n);
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t i = 0; i < n; ++i) {
            const double sw = std::sqrt(weights[i]);
            fwd(m, i) = sw * psi(m, i);
            inv(i, m) = psi(m, i) / sw;
        }

    // Coefficient-space derivative: c_n -> sqrt((n+1)/2) c_{n+1}.
    Eigen::MatrixXd shift = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t m = 0; m + 1 < n; ++m) shift(m, m + 1) = std::sqrt((m + 1) / 2.0);
    d1 = inv * shift * fwd;
    d2 = inv * (shift * shift) * fwd;

    Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t m = 0; m < n; ++m) lam(m, m) = -0.5 * static_cast<double>(m);
    ou = inv * lam * fwd;
}

void theta_line_matrices(const std::vector<double>& nodes, Eigen::MatrixXd& fwd,
                         Eigen::MatrixXd& inv, Eigen::MatrixXd& d1, Eigen::MatrixXd& d2,
                         std::vector<double>& m2diag) {
    const std::size_t n = nodes.size();
    const std::size_t half = n / 2;
    // Basis order: 1, cos t, sin t, cos 2t, sin 2t, ..., cos(half*t).
    inv.resize(n, n);
    Eigen::MatrixXd d1coef = Eigen::MatrixXd::Zero(n, n);
    m2diag.assign(n, 0.0);
    std::vector<double> quad(n, 0.0);  // quadrature normalizers
    for (std::size_t i = 0; i < n; ++i) inv(i, 0) = 1.0;
    quad[0] = static_cast<double>(n);
    for (std::size_t m = 1; m < half; ++m) {
        const std::size_t ic = 2 * m - 1, is = 2 * m;
        for (std::size_t i = 0; i < n; ++i) {
            inv(i, ic) = std::cos(m * nodes[i]);
            inv(i, is) = std::sin(m * nodes[i]);
        }
        quad[ic] = quad[is] = n / 2.0;
        m2diag[ic] = m2diag[is] = -static_cast<double>(m) * m;
        d1coef(is, ic) = -static_cast<double>(m);  // d/dt cos(mt) = -m sin(mt)
        d1coef(ic, is) = static_cast<double>(m);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, n - 1) = std::cos(half * nodes[i]);
    quad[n - 1] = static_cast<double>(n);
    m2diag[n - 1] = -static_cast<double>(half) * half;
    // Nyquist cosine has no sine partner; its first derivative is dropped.

    fwd.resize(n, n);
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t i = 0; i < n; ++i) fwd(m, i) = inv(i, m) / quad[m];

    d1 = inv * d1coef * fwd;
    Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t m = 0; m < n; ++m) lam(m, m) = m2diag[m];
    d2 = inv * lam * fwd;
}

}  // namespace

SpectralOps::SpectralOps(GridPtr grid) : grid_(std::move(grid)) {
    hermite_line_matrices(grid_->nodes_y1(), grid_->weights_y1(), fwd1_, inv1_, d1y1_, d2y1_, ou1_);
    if (grid_->n2() == grid_->n1() && grid_->nodes_y2() == grid_->nodes_y1()) {
        fwd2_ = fwd1_;
        inv2_ = inv1_;
        d1y2_ = d1y1_;
        d2y2_ = d2y1_;
        ou2_ = ou1_;
    } else {
        hermite_line_matrices(grid_->nodes_y2(), grid_->weights_y2(), fwd2_, inv2_, d1y2_, d2y2_,
                              ou2_);
    }
    theta_line_matrices(grid_->nodes_theta(), fwdth_, invth_, d1th_, d2th_, th_m2_);
}

void SpectralOps::apply_along_y1(const Eigen::MatrixXd& op, const std::vector<double>& in,
                                 std::vector<double>& out) const {
    const auto n1 = grid_->n1();
    const auto cols = grid_->n2() * grid_->ntheta();
    Eigen::Map<const RowMat> a(in.data(), n1, cols);
    Eigen::Map<RowMat> o(out.data(), n1, cols);
    o = op * a;
}

void SpectralOps::apply_along_y2(const Eigen::MatrixXd& op, const std::vector<double>& in,
                                 std::vector<double>& out) const {
    const auto n1 = grid_->n1();
    const auto n2 = grid_->n2();
    const auto nth = grid_->ntheta();
    for (std::size_t i = 0; i < n1; ++i) {
        Eigen::Map<const RowMat> a(in.data() + i * n2 * nth, n2, nth);
        Eigen::Map<RowMat> o(out.data() + i * n2 * nth, n2, nth);
        o = op * a;
    }
}

void SpectralOps::apply_along_theta(const Eigen::MatrixXd& op, const std::vector<double>& in,
                                    std::vector<double>& out) const {
    const auto rows = grid_->n1() * grid_->n2();
    const auto nth = grid_->ntheta();
    Eigen::Map<const RowMat> a(in.data(), rows, nth);
    Eigen::Map<RowMat> o(out.data(), rows, nth);
    o = a * op.transpose();
}

const SpectralOps& spectral_ops(const GridPtr& grid) {
    static std::mutex mtx;
    static std::map<const QuadratureGrid*, std::unique_ptr<SpectralOps>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[grid.get()];
    if (!slot) slot = std::make_unique<SpectralOps>(grid);
    return *slot;
}

double inner_product(const GridFunction& f, const GridFunction& g) {
    if (!f.grid().same_grid(g.grid()))
        throw std::invalid_argument("inner_product: functions live on different grids");
    const auto& q = f.grid();
    double total = 0.0;
    for (std::size_t i = 0; i < q.n1(); ++i)
        for (std::size_t j = 0; j < q.n2(); ++j) {
            double tsum = 0.0;
            for (std::size_t k = 0; k < q.ntheta(); ++k) tsum += f(i, j, k) * g(i, j, k);
            total += q.node_weight(i, j, 0) * tsum;
        }
    return total;
}

double norm_sq(const GridFunction& f) { return inner_product(f, f); }
double norm(const GridFunction& f) { return std::sqrt(std::max(0.0, norm_sq(f))); }

namespace {

GridFunction apply_axis(const GridFunction& f, int axis, bool second) {
    const auto& ops = spectral_ops(f.grid_ptr());
    GridFunction out(f.grid_ptr());
    switch (axis) {
        case 0:
            ops.apply_along_y1(second ? ops.d2_y1() : ops.d1_y1(), f.values(),
                               out.mutable_values());
            break;
        case 1:
            ops.apply_along_y2(second ? ops.d2_y2() : ops.d1_y2(), f.values(),
                               out.mutable_values());
            break;
        default:
            ops.apply_along_theta(second ? ops.d2_theta() : ops.d1_theta(), f.values(),
                                  out.mutable_values());
    }
    return out;
}

}  // namespace

GridFunction d_y1(const GridFunction& f) { return apply_axis(f, 0, false); }
GridFunction d_y2(const GridFunction& f) { return apply_axis(f, 1, false); }
GridFunction d_theta(const GridFunction& f) { return apply_axis(f, 2, false); }
GridFunction d2_y1(const GridFunction& f) { return apply_axis(f, 0, true); }
GridFunction d2_y2(const GridFunction& f) { return apply_axis(f, 1, true); }
GridFunction d2_theta(const GridFunction& f) { return apply_axis(f, 2, true); }
GridFunction d2_y1y2(const GridFunction& f) { return d_y2(d_y1(f)); }
GridFunction d2_y1theta(const GridFunction& f) { return d_theta(d_y1(f)); }
GridFunction d2_y2theta(const GridFunction& f) { return d_theta(d_y2(f)); }

GridFunction apply_ou(const GridFunction& f, bool shifted) {
    const auto& g = f.grid();
    if (g.n1() < 8 || g.n2() < 8 || g.ntheta() < 4)
        throw std::invalid_argument("apply_ou: grid too coarse for spectral differentiation");
    const auto& ops = spectral_ops(f.grid_ptr());
    GridFunction out(f.grid_ptr());
    std::vector<double> tmp(f.values().size());
    ops.apply_along_y1(ops.ou_y1(), f.values(), out.mutable_values());
    ops.apply_along_y2(ops.ou_y2(), f.values(), tmp);
    for (std::size_t n = 0; n < tmp.size(); ++n) out.mutable_values()[n] += tmp[n];
    ops.apply_along_theta(ops.d2_theta(), f.values(), tmp);
    const double c = shifted ? 0.5 : 1.0;
    for (std::size_t n = 0; n < tmp.size(); ++n)
        out.mutable_values()[n] += 0.5 * tmp[n] + c * f.values()[n];
    return out;
}

SpectralBasis::SpectralBasis(GridPtr grid) {
    auto mk = [&](const char* label, double ev, auto fn) {
        GridFunction phi = GridFunction::from_function(grid, fn);
        return Eigenfunction{label, ev, std::move(phi), 0.0};
    };
    unstable_.push_back(mk("1", 1.0, [](double, double, double) { return 1.0; }));
    unstable_.push_back(mk("y1", 0.5, [](double a, double, double) { return a; }));
    unstable_.push_back(mk("y2", 0.5, [](double, double b, double) { return b; }));
    unstable_.push_back(mk("cos_theta", 0.5, [](double, double, double t) { return std::cos(t); }));
    unstable_.push_back(mk("sin_theta", 0.5, [](double, double, double t) { return std::sin(t); }));

    neutral_.push_back(mk("y1^2-2", 0.0, [](double a, double, double) { return a * a - 2.0; }));
    neutral_.push_back(mk("y2^2-2", 0.0, [](double, double b, double) { return b * b - 2.0; }));
    neutral_.push_back(mk("y1*y2", 0.0, [](double a, double b, double) { return a * b; }));
    neutral_.push_back(
        mk("y1*cos_theta", 0.0, [](double a, double, double t) { return a * std::cos(t); }));
    neutral_.push_back(
        mk("y1*sin_theta", 0.0, [](double a, double, double t) { return a * std::sin(t); }));
    neutral_.push_back(
        mk("y2*cos_theta", 0.0, [](double, double b, double t) { return b * std::cos(t); }));
    neutral_.push_back(
        mk("y2*sin_theta", 0.0, [](double, double b, double t) { return b * std::sin(t); }));

    // Grid-level Gram-Schmidt within each family (the functions are already
    // orthogonal in exact arithmetic; this pins discrete orthogonality).
    auto orthogonalize = [](std::vector<Eigenfunction>& fam) {
        for (std::size_t a = 0; a < fam.size(); ++a) {
            for (std::size_t b = 0; b < a; ++b) {
                const double c = inner_product(fam[a].phi, fam[b].phi) / fam[b].norm_squared;
                fam[a].phi = fam[a].phi - fam[b].phi * c;
            }
            fam[a].norm_squared = norm_sq(fam[a].phi);
        }
    };
    orthogonalize(unstable_);
    orthogonalize(neutral_);

    unstable_sh_.push_back(unstable_[0]);
    neutral_sh_.push_back(unstable_[1]);
    neutral_sh_.push_back(unstable_[2]);
    neutral_sh_.push_back(unstable_[3]);
    neutral_sh_.push_back(unstable_[4]);
}

double SpectralBasis::max_cross_correlation() const {
    std::vector<const Eigenfunction*> all;
    for (const auto& e : unstable_) all.push_back(&e);
    for (const auto& e : neutral_) all.push_back(&e);
    double worst = 0.0;
    for (std::size_t a = 0; a < all.size(); ++a)
        for (std::size_t b = a + 1; b < all.size(); ++b) {
            const double c = std::fabs(inner_product(all[a]->phi, all[b]->phi)) /
                             std::sqrt(all[a]->norm_squared * all[b]->norm_squared);
            worst = std::max(worst, c);
        }
    return worst;
}

const SpectralBasis& spectral_basis(const GridPtr& grid) {
    static std::mutex mtx;
    static std::map<const QuadratureGrid*, std::unique_ptr<SpectralBasis>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto& slot = cache[grid.get()];
    if (!slot) slot = std::make_unique<SpectralBasis>(grid);
    return *slot;
}

namespace {

GridFunction project_onto(const std::vector<Eigenfunction>& fam, const GridFunction& f) {
    GridFunction out(f.grid_ptr());
    for (const auto& e : fam) {
        const double c = inner_product(e.phi, f) / e.norm_squared;
        out = out + e.phi * c;
    }
    return out;
}

}  // namespace

GridFunction project(const GridFunction& f, Mode mode, OpKind op) {
    const auto& basis = spectral_basis(f.grid_ptr());
    const auto& unstable = (op == OpKind::L) ? basis.unstable() : basis.unstable_shifted();
    const auto& neutral = (op == OpKind::L) ? basis.neutral() : basis.neutral_shifted();
    switch (mode) {
        case Mode::Unstable:
            return project_onto(unstable, f);
        case Mode::Neutral:
            return project_onto(neutral, f);
        case Mode::Stable:
            return f - project_onto(unstable, f) - project_onto(neutral, f);
    }
    throw std::logic_error("project: bad mode");
}

std::array<double, 7> spectral_coefficients(const GridFunction& u_hat) {
    GridPtr grid = u_hat.grid_ptr();
    auto coeff = [&](auto fn) {
        GridFunction phi = GridFunction::from_function(grid, fn);
        return inner_product(phi, u_hat) / norm_sq(phi);
    };
    return {
        coeff([](double a, double, double) { return a * a - 2.0; }),
        coeff([](double, double b, double) { return b * b - 2.0; }),
        coeff([](double a, double b, double) { return 2.0 * a * b; }),
        coeff([](double a, double, double t) { return a * std::cos(t); }),
        coeff([](double a, double, double t) { return a * std::sin(t); }),
        coeff([](double, double b, double t) { return b * std::cos(t); }),
        coeff([](double, double b, double t) { return b * std::sin(t); }),
    };
}

GridFunction cutoff_truncate(const GridFunction& u, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("cutoff_truncate: radius must be positive");
    const auto& g = u.grid();
    GridFunction out(u.grid_ptr());
    for (std::size_t i = 0; i < g.n1(); ++i)
        for (std::size_t j = 0; j < g.n2(); ++j) {
            const double y1 = g.nodes_y1()[i], y2 = g.nodes_y2()[j];
            const double c = chi_cutoff(std::sqrt(y1 * y1 + y2 * y2) / radius);
            for (std::size_t k = 0; k < g.ntheta(); ++k) {
                const auto n = g.flat_index(i, j, k);
                out.mutable_values()[n] = c * u.values()[n];
            }
        }
    return out;
}

}  // namespace bslab
