#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace bslab {

/// Nodes and weights of an N-point Gauss rule for the weight exp(-y^2/4) on R.
/// Polynomially exact up to degree 2N-1.
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

HermiteRule gauss_hermite_quarter(std::size_t n);

/// Tensor quadrature over Gamma = R^2 x S^1(sqrt(2)) for the Gaussian measure
/// (4*pi)^(-3/2) * exp(-|q|^2/4) dq, with |q|^2 = y1^2 + y2^2 + 2.
///
/// y-directions carry Gauss-Hermite rules adapted to exp(-y^2/4); the circle
/// carries uniform angles with trapezoid (= uniform, periodic) weights and the
/// arclength factor sqrt(2).
class QuadratureGrid {
public:
    QuadratureGrid(std::size_t n1, std::size_t n2, std::size_t ntheta);

    std::size_t n1() const { return n1_; }
    std::size_t n2() const { return n2_; }
    std::size_t ntheta() const { return ntheta_; }
    std::size_t size() const { return n1_ * n2_ * ntheta_; }

    const std::vector<double>& nodes_y1() const { return y1_.nodes; }
    const std::vector<double>& nodes_y2() const { return y2_.nodes; }
    const std::vector<double>& nodes_theta() const { return theta_; }

    const std::vector<double>& weights_y1() const { return y1_.weights; }
    const std::vector<double>& weights_y2() const { return y2_.weights; }
    double weight_theta() const { return wtheta_; }

    /// Prefactor (4*pi)^(-3/2) * exp(-1/2) * sqrt(2) shared by all node weights.
    double measure_prefactor() const { return prefactor_; }

    /// Full measure weight of node (i,j,k).
    double node_weight(std::size_t i, std::size_t j, std::size_t k) const {
        (void)k;
        return prefactor_ * wtheta_ * y1_.weights[i] * y2_.weights[j];
    }

    std::size_t flat_index(std::size_t i, std::size_t j, std::size_t k) const {
        return (i * n2_ + j) * ntheta_ + k;
    }

    /// Total mass of the measure: the closed-form value sqrt(2*pi/e).
    double total_mass() const;

    bool same_grid(const QuadratureGrid& other) const { return this == &other; }

private:
    std::size_t n1_, n2_, ntheta_;
    HermiteRule y1_, y2_;
    std::vector<double> theta_;
    double wtheta_;
    double prefactor_;
};

using GridPtr = std::shared_ptr<const QuadratureGrid>;

GridPtr make_grid(std::size_t n1, std::size_t n2, std::size_t ntheta);

}  // namespace bslab
