#pragma once

#include "bslab/grid_function.hpp"
#include "bslab/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace bslab {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense collocation machinery for one grid: orthonormal-polynomial transforms
/// on the Hermite nodes (weight exp(-y^2/4)), trigonometric transforms on the
/// circle, and the nodal differentiation / Ornstein-Uhlenbeck operators built
/// from them. Differentiation is spectral: exact on the resolved basis.
class SpectralOps {
public:
    explicit SpectralOps(GridPtr grid);

    const QuadratureGrid& grid() const { return *grid_; }

    // Line transforms. fwd maps nodal values to orthonormal-basis coefficients,
    // inv maps back; inv*fwd = identity up to roundoff.
    const Eigen::MatrixXd& fwd_y1() const { return fwd1_; }
    const Eigen::MatrixXd& inv_y1() const { return inv1_; }
    const Eigen::MatrixXd& fwd_y2() const { return fwd2_; }
    const Eigen::MatrixXd& inv_y2() const { return inv2_; }
    const Eigen::MatrixXd& fwd_theta() const { return fwdth_; }
    const Eigen::MatrixXd& inv_theta() const { return invth_; }

    // Nodal single-line operators.
    const Eigen::MatrixXd& d1_y1() const { return d1y1_; }
    const Eigen::MatrixXd& d2_y1() const { return d2y1_; }
    const Eigen::MatrixXd& d1_y2() const { return d1y2_; }
    const Eigen::MatrixXd& d2_y2() const { return d2y2_; }
    const Eigen::MatrixXd& d1_theta() const { return d1th_; }
    const Eigen::MatrixXd& d2_theta() const { return d2th_; }
    // 1-D Ornstein-Uhlenbeck building block d^2/dy^2 - (y/2) d/dy.
    const Eigen::MatrixXd& ou_y1() const { return ou1_; }
    const Eigen::MatrixXd& ou_y2() const { return ou2_; }

    /// -m^2 multiplier per theta-basis index (order: 1, cos, sin, cos2, ...).
    const std::vector<double>& theta_d2_diag() const { return th_m2_; }

    // Apply a line operator along one axis of the flattened (i,j,k) layout.
    void apply_along_y1(const Eigen::MatrixXd& op, const std::vector<double>& in,
                        std::vector<double>& out) const;
    void apply_along_y2(const Eigen::MatrixXd& op, const std::vector<double>& in,
                        std::vector<double>& out) const;
    void apply_along_theta(const Eigen::MatrixXd& op, const std::vector<double>& in,
                           std::vector<double>& out) const;

private:
    GridPtr grid_;
    Eigen::MatrixXd fwd1_, inv1_, fwd2_, inv2_, fwdth_, invth_;
    Eigen::MatrixXd d1y1_, d2y1_, d1y2_, d2y2_, d1th_, d2th_, ou1_, ou2_;
    std::vector<double> th_m2_;
};

/// Shared per-grid cache of the dense operators (construction is quadratic in
/// grid size; reuse is what makes repeated operator application cheap).
const SpectralOps& spectral_ops(const GridPtr& grid);

/// Gaussian L^2 pairing of two functions on one grid.
double inner_product(const GridFunction& f, const GridFunction& g);
double norm_sq(const GridFunction& f);
double norm(const GridFunction& f);

// Spectral differentiation.
GridFunction d_y1(const GridFunction& f);
GridFunction d_y2(const GridFunction& f);
GridFunction d_theta(const GridFunction& f);
GridFunction d2_y1(const GridFunction& f);
GridFunction d2_y2(const GridFunction& f);
GridFunction d2_theta(const GridFunction& f);
GridFunction d2_y1y2(const GridFunction& f);
GridFunction d2_y1theta(const GridFunction& f);
GridFunction d2_y2theta(const GridFunction& f);

/// The full operator d1^2 + d2^2 - (y1/2) d1 - (y2/2) d2 + (1/2) dtheta^2 + 1,
/// or its shift by -1/2 when `shifted` is set.
GridFunction apply_ou(const GridFunction& f, bool shifted = false);

struct Eigenfunction {
    std::string label;
    double eigenvalue;  ///< eigenvalue under the unshifted operator
    GridFunction phi;
    double norm_squared;
};

/// The explicit unstable/neutral eigenfunctions with their eigenvalues.
/// Orthonormalized on the grid by Gram-Schmidt at construction.
class SpectralBasis {
public:
    explicit SpectralBasis(GridPtr grid);

    const std::vector<Eigenfunction>& unstable() const { return unstable_; }
    const std::vector<Eigenfunction>& neutral() const { return neutral_; }

    /// Index sets for the shifted operator: unstable' = {1},
    /// neutral' = {y1, y2, cos theta, sin theta}.
    const std::vector<Eigenfunction>& unstable_shifted() const { return unstable_sh_; }
    const std::vector<Eigenfunction>& neutral_shifted() const { return neutral_sh_; }

    /// Max |<phi_a, phi_b>| / (|phi_a| |phi_b|) over distinct listed pairs.
    double max_cross_correlation() const;

private:
    std::vector<Eigenfunction> unstable_, neutral_, unstable_sh_, neutral_sh_;
};

const SpectralBasis& spectral_basis(const GridPtr& grid);

enum class Mode { Unstable, Neutral, Stable };
enum class OpKind { L, Lprime };

GridFunction project(const GridFunction& f, Mode mode, OpKind op = OpKind::L);

/// Coefficients of u_hat against y1^2-2, y2^2-2, 2*y1*y2, y1*cos, y1*sin,
/// y2*cos, y2*sin, each normalized by the squared norm of the test function.
std::array<double, 7> spectral_coefficients(const GridFunction& u_hat);

/// u * chi(|y|/radius) with the fixed quintic cutoff (1 on [0,1], 0 on [2,inf)).
GridFunction cutoff_truncate(const GridFunction& u, double radius);

}  // namespace bslab
