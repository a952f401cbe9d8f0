#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace bslab {

/// Concave rotational profile v on [0, a] solving
///   v'' / (1 + v'^2) - (y/2) v' + v/2 - 1/v = 0,  v(a) = 0,  v'(y) -> -inf at a,
/// sampled on a graded mesh clustered toward the tip, together with the
/// inverted-coordinate samples (y, dy/dv as functions of v) that regularize the
/// vertical tangency.
class ShrinkerProfile {
public:
    double a() const { return a_; }
    double center_value() const { return v_.front(); }          ///< v(0)
    double center_slope() const { return vp_.front(); }         ///< v'(0), ~0 by symmetry
    const std::vector<double>& mesh() const { return y_; }
    const std::vector<double>& v() const { return v_; }
    const std::vector<double>& vp() const { return vp_; }
    const std::vector<double>& vpp() const { return vpp_; }

    // Tip-regularization data: v increasing from 0, y(v), w(v) = dy/dv.
    const std::vector<double>& tip_v() const { return tv_; }
    const std::vector<double>& tip_y() const { return ty_; }
    const std::vector<double>& tip_w() const { return tw_; }

    /// (v, v', v'') at y in [0, a]; cubic Hermite between mesh samples, tip
    /// branch evaluated through the inverted parametrization.
    std::array<double, 3> evaluate(double y) const;

    /// v value at y via the same interpolation (convenience).
    double value(double y) const { return evaluate(y)[0]; }

    /// Sup of the ODE residual over interior mesh points, with derivatives
    /// re-estimated by finite differences (independent of the stored ones).
    double fd_residual_sup() const;

    /// Max of v'' over the mesh (<= 0 up to roundoff for a concave profile).
    double max_vpp() const;

    /// CSV `y,v,vp,vpp` plus a trailing summary comment line.
    void write_csv(std::ostream& os) const;

    /// Radially scaled copy (v -> factor * v). Not a solution for factor != 1;
    /// used as a corrupted-profile negative control.
    ShrinkerProfile scaled(double factor) const;

    friend ShrinkerProfile solve_shrinker(double a, double tol);

private:
    double a_ = 0.0;
    std::vector<double> y_, v_, vp_, vpp_;
    std::vector<double> tv_, ty_, tw_;
    double y_switch_ = 0.0;  ///< body/tip split point
    bool solution_ = false;  ///< true for solver output; scaled copies clear it
};

/// Integrate the profile from the tip expansion down to y = 0. The regular cap
/// asymptotics pin every series coefficient, so the family is parametrized by
/// `a` alone; insisting on them is what removes the singular 1/v branch.
ShrinkerProfile solve_shrinker(double a, double tol = 1e-10);

/// Right-hand side value v'' implied by the ODE at (y, v, v').
double shrinker_vpp(double y, double v, double vp);

}  // namespace bslab
