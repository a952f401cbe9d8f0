#pragma once

#include <array>
#include <functional>
#include <vector>

namespace bslab {

/// Pointwise geometry of a model hypersurface in R^4 at one parameter point.
struct SurfaceGeometry {
    std::array<double, 4> position{};
    std::array<double, 4> normal{};     ///< outward unit normal
    double mean_curvature = 0.0;        ///< H > 0 for the shrinking cylinder
    double second_fund_sq = 0.0;        ///< |A|^2
    std::array<double, 4> laplace_x{};  ///< surface Laplacian of the coordinates
    double nu1 = 0.0;                   ///< <normal, e1>
    double nu2 = 0.0;
};

/// Exact shrinking cylinder R^2 x S^1(sqrt(-2t)) or a graph over it, given by a
/// renormalized offset ubar(y1, y2, theta, tau): the radius at unrescaled
/// parameters (x1, x2, phi) and time t < 0 is
///   R = sqrt(|t|) (sqrt(2) + ubar(x1/sqrt|t|, x2/sqrt|t|, phi, -log|t|)).
/// Exact-cylinder geometry is analytic; graph geometry comes from 4th-order
/// finite differences in the parameters.
class ModelSurface {
public:
    using GraphFn = std::function<double(double, double, double, double)>;

    static ModelSurface exact_cylinder();
    static ModelSurface graph_over_cylinder(GraphFn ubar);

    bool is_exact() const { return !ubar_; }

    /// Geometry at parameters (x1, x2, phi) and time t < 0.
    SurfaceGeometry geometry(double x1, double x2, double phi, double t) const;

    /// Ambient position of the parameter point.
    std::array<double, 4> position(double x1, double x2, double phi, double t) const;

    /// Surface Laplacian of an ambient scalar field g(x) at the parameter point
    /// (finite differences on the parametrization; exact route for cylinders).
    double laplace_beltrami(double x1, double x2, double phi, double t,
                            const std::function<double(const std::array<double, 4>&)>& g) const;

private:
    explicit ModelSurface(GraphFn fn) : ubar_(std::move(fn)) {}

    double radius(double x1, double x2, double phi, double t) const;

    GraphFn ubar_;  ///< empty for the exact cylinder
};

/// Convenience free function mirroring the operation name used elsewhere.
inline SurfaceGeometry surface_geometry(const ModelSurface& m, double x1, double x2, double phi,
                                        double t) {
    return m.geometry(x1, x2, phi, t);
}

}  // namespace bslab
