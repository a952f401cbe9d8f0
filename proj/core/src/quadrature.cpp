#include "bslab/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bslab {

namespace {

// Orthonormal polynomials for the weight exp(-y^2/4) up to degree nmax,
// evaluated at one point: phi_0 = (2 sqrt(pi))^(-1/2),
// phi_{k+1} = (y phi_k - sqrt(2k) phi_{k-1}) / sqrt(2(k+1)).
void orthonormal_values(double y, std::size_t nmax, std::vector<double>& phi) {
    phi.resize(nmax + 1);
    const double m0 = 2.0 * std::sqrt(std::numbers::pi);
    phi[0] = 1.0 / std::sqrt(m0);
    if (nmax >= 1) phi[1] = y * phi[0] / std::sqrt(2.0);
    for (std::size_t k = 2; k <= nmax; ++k)
        phi[k] = (y * phi[k - 1] - std::sqrt(2.0 * (k - 1)) * phi[k - 2]) /
                 std::sqrt(2.0 * static_cast<double>(k));
}

}  // namespace

// Nodes from the Jacobi-matrix eigenvalues (Golub-Welsch), polished by Newton
// on phi_n; weights from the Christoffel function, w_i = 1 / sum phi_m(y_i)^2.
// The eigenvector route for the weights loses all relative accuracy at the
// extreme nodes, where the first components underflow toward 1e-24.
HermiteRule gauss_hermite_quarter(std::size_t n) {
    if (n < 2) throw std::invalid_argument("gauss_hermite_quarter: need n >= 2");
    if (n > 96) throw std::invalid_argument("gauss_hermite_quarter: n > 96 overflows the rule");

    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 1; k < n; ++k) {
        const double b = std::sqrt(static_cast<double>(k) / 2.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss_hermite_quarter: eigensolver failed");

    HermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    std::vector<double> phi;
    for (std::size_t i = 0; i < n; ++i) {
        double y = 2.0 * es.eigenvalues()(i);
        for (int it = 0; it < 6; ++it) {
            orthonormal_values(y, n, phi);
            const double deriv = std::sqrt(n / 2.0) * phi[n - 1];
            if (deriv == 0.0) break;
            const double step = phi[n] / deriv;
            y -= step;
            if (std::fabs(step) < 1e-15 * (1.0 + std::fabs(y))) break;
        }
        orthonormal_values(y, n, phi);
        double christoffel = 0.0;
        for (std::size_t m = 0; m < n; ++m) christoffel += phi[m] * phi[m];
        rule.nodes[i] = y;
        rule.weights[i] = 1.0 / christoffel;
    }
    return rule;
}

QuadratureGrid::QuadratureGrid(std::size_t n1, std::size_t n2, std::size_t ntheta)
    : n1_(n1), n2_(n2), ntheta_(ntheta) {
    if (n1 < 4 || n2 < 4) throw std::invalid_argument("QuadratureGrid: need N1, N2 >= 4");
    if (ntheta < 4 || ntheta % 2 != 0)
        throw std::invalid_argument("QuadratureGrid: need even N_theta >= 4");
    y1_ = gauss_hermite_quarter(n1);
    y2_ = (n2 == n1) ? y1_ : gauss_hermite_quarter(n2);

    theta_.resize(ntheta);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t k = 0; k < ntheta; ++k) theta_[k] = two_pi * static_cast<double>(k) / ntheta;
    wtheta_ = two_pi / static_cast<double>(ntheta);

    const double four_pi = 4.0 * std::numbers::pi;
    prefactor_ = std::pow(four_pi, -1.5) * std::exp(-0.5) * std::sqrt(2.0);
}

double QuadratureGrid::total_mass() const {
    return std::sqrt(2.0 * std::numbers::pi / std::numbers::e);
}

GridPtr make_grid(std::size_t n1, std::size_t n2, std::size_t ntheta) {
    return std::make_shared<const QuadratureGrid>(n1, n2, ntheta);
}

}  // namespace bslab
