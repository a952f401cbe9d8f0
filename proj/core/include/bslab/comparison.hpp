#pragma once

#include "bslab/model_surface.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace bslab {

/// Anisotropic squared renormalized distance
///   f_alpha(x, t) = alpha x1^2/|t| + (2 - beta)^{-1} x2^2/|t|,
/// together with its renormalized radius r_alpha(y) and the ambient calculus
/// needed by the evolution and gradient checks.
struct AnisoDistance {
    double alpha;
    double beta;

    AnisoDistance(double alpha_in, double beta_in);

    double value(double x1, double x2, double t) const;
    double dt(double x1, double x2, double t) const;                ///< explicit time derivative
    std::array<double, 4> gradient(double x1, double x2, double t) const;
    std::array<double, 4> hessian_diag(double x1, double x2, double t) const;
    double r_alpha(double y1, double y2) const;
};

/// One evaluated sample of a pointwise comparison check.
struct CheckSample {
    std::array<double, 4> x{};
    double t = 0.0;
    double residual = 0.0;
    bool included = true;
    std::string note;
};

struct CheckReport {
    std::string name;
    double min_residual = 0.0;  ///< over included samples
    std::size_t total = 0, excluded = 0;
    bool pass = false;
    std::vector<CheckSample> samples;

    void write_csv(std::ostream& os) const;  ///< x1,x2,t,residual,verdict
};

/// Parameter point on a model surface at one time.
struct SurfacePoint {
    double x1, x2, phi, t;
};

/// Evolution and gradient inequalities for f_alpha along mean curvature flow:
///   (d_t - Lap) f_alpha >= (f_alpha - 2)/|t|,
///   |grad f_alpha|^2 <= (16 - 4 beta) f_alpha / ((8 - 7 beta) |t|).
/// Residuals are reported in the dimensionless form (multiplied by |t|).
CheckReport check_aniso_evolution(const ModelSurface& m, const AnisoDistance& dist,
                                  const std::vector<SurfacePoint>& samples, double tol = 1e-8);

enum class SupersolutionKind { PsiB, PhiDelta };

/// Jacobi supersolutions on horizontal strips:
///   Psi_b   = exp(x1^2/(4|t|) - (log|t| - 2 log zhat)^{2b}),      b in [2, 7],
///   Phi_del = exp(delta^2 x1^2/|t| - 100 (log|t|)^2),             delta in (0, 1/2).
struct HeatBarrier {
    SupersolutionKind kind;
    double b = 2.0;
    double delta = 0.1;
    double zhat = 1.0;

    static HeatBarrier psi_b(double b, double zhat = 1.0);
    static HeatBarrier phi_delta(double delta);

    double value(double x1, double t) const;
    double exponent(double x1, double t) const;
    double dt_over_value(double x1, double t) const;
    double dx_over_value(double x1, double t) const;
    double dxx_over_value(double x1, double t) const;
    /// Region of validity: |x1|/|t|^(1/2) <= 2 (log|t| - 2 log zhat)^b for Psi_b.
    bool in_region(double x1, double t) const;
};

/// Residual of (d_t - Lap - |A|^2) F at the samples, reported relative to F.
/// PASS means strictly positive at every in-region sample.
CheckReport check_jacobi_supersolution(const HeatBarrier& barrier, const ModelSurface& m,
                                       const std::vector<SurfacePoint>& samples);

struct RegularizedSlopeResult {
    std::vector<double> nu1_eps;  ///< (|nu1| - eps zeta)_+ per sample
    CheckReport zeta_check;       ///< supersolution residual of zeta on the qualifying set
};

/// Regularized slope (|nu1| - eps zeta)_+ with zeta = exp(f_alpha/4); on
/// {nu1_eps > 0} intersected with {60/beta <= f_alpha <= log|t| - 2 log zhat}
/// verifies (d_t - Lap - |A|^2) zeta >= 0. Samples violating the curvature
/// assumption |A|^2 <= 5 |t|^{-1}/beta are excluded and flagged.
RegularizedSlopeResult regularized_slope(const ModelSurface& m, const AnisoDistance& dist,
                                         const std::vector<SurfacePoint>& samples, double eps,
                                         double zhat = 1.0);

/// |t|-scaled supersolution residual of zeta = exp(f_alpha/4):
///   |t| (d_t - Lap - |A|^2) zeta / zeta
/// expressed through the dimensionless inputs f_i = x_i^2/|t|, the normal
/// components, and |A|^2 |t|. Stays finite for region thresholds such as
/// f_alpha ~ 60/beta that no representable time can reach directly.
double zeta_supersolution_scaled(const AnisoDistance& dist, double f1, double f2, double nu1,
                                 double nu2, double a2_times_t);

/// Closed-form solution of the half-line heat equation with psi(0, t) = 0 and
/// psi(x, 0) = 1; returns (psi, psi_x, psi_xx). Requires x >= 0 and t > 0.
std::array<double, 3> dirichlet_heat(double x, double t);

}  // namespace bslab
