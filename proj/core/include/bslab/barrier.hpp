#pragma once

#include "bslab/shrinker.hpp"

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace bslab {

/// Elliptically rotated hypersurface built from the rotational profile for
/// a2 - 1: points ((a1/a2) r cos t, r sin t, y3, y4) with r >= L and
/// (r - 1, y3, y4) on the profile surface. The {y1 > 0} half is the graph
/// y1 = lambda * F(y2, rho), rho = |(y3, y4)|, with lambda = a1/a2 and F the
/// graph of the round (a1 = a2) case.
class BarrierSurface {
public:
    BarrierSurface(double a1, double a2, double L, std::shared_ptr<const ShrinkerProfile> profile);

    double a1() const { return a1_; }
    double a2() const { return a2_; }
    double L() const { return L_; }
    double lambda() const { return a1_ / a2_; }
    const ShrinkerProfile& profile() const { return *profile_; }

    /// Inverse of the profile on the outer branch: the offset y with
    /// v_{a2-1}(y) = rho, y in [L - 1, a2 - 1].
    double profile_inverse(double rho) const;

    /// Unscaled graph F(y2, rho) of the round case (r = 1 + profile_inverse(rho)).
    double graph(double y2, double rho) const;

    /// Largest rho on the r >= L branch: v_{a2-1}(L-1).
    double rho_max() const { return rho_max_; }

    /// Extrema of the coordinates over a fine parameter sweep.
    double max_y1() const { return max_y1_; }
    double max_y2() const { return max_y2_; }

private:
    double a1_, a2_, L_;
    std::shared_ptr<const ShrinkerProfile> profile_;
    double rho_max_;
    double max_y1_, max_y2_;
};

BarrierSurface build_barrier(double a1, double a2, double L);

struct BarrierSample {
    double r, theta;
    double residual;  ///< graph-inequality left side, negative means failure
    double grad_sq;   ///< |Df|^2 at the sample; residual/sqrt(1+grad_sq) is the
                      ///< rotation-invariant normal-speed form
    bool included;
};

struct BarrierReport {
    double min_residual = 0.0;           ///< over included samples
    double min_scaled_residual = 0.0;    ///< residual / local scale
    std::size_t total = 0, excluded = 0;
    bool pass = false;
    std::vector<BarrierSample> samples;

    void write_csv(std::ostream& os) const;  ///< r,theta,residual rows
};

/// Pointwise verification of
///   Delta f - f_ij f_i f_j / (1 + |Df|^2) + (f - y_i f_i)/2 >= 0
/// for f = lambda_override * F (surface lambda when the override is not given),
/// with derivatives of F estimated by finite differences around each sample of
/// an (r, theta) product grid. A collar of width 0.1 around r = L and a thin
/// ring at the tip are excluded and reported.
BarrierReport verify_inner_barrier(const BarrierSurface& b, std::size_t n_r = 160,
                                   std::size_t n_theta = 48,
                                   std::optional<double> lambda_override = std::nullopt,
                                   double tol = 1e-6);

/// Lower-bound evaluator for the profile in the ellipsoidal domain:
///   (y1, y2) -> sqrt(2 - (1+delta)(alpha^2 y1^2 + y2^2) / |tau + 2 log zhat|) - sqrt(2).
class EllipsoidalLowerBound {
public:
    EllipsoidalLowerBound(double tau, double alpha, double delta, double zhat);

    bool in_domain(double y1, double y2) const;
    double operator()(double y1, double y2) const;  ///< throws outside the domain
    double domain_radius_sq() const { return domain_rhs_; }

private:
    double alpha_, delta_;
    double denom_;       ///< |tau + 2 log zhat|
    double domain_rhs_;  ///< 2 |tau + 2 log zhat| / (1 + delta)
};

}  // namespace bslab
