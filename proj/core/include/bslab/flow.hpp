#pragma once

#include "bslab/grid_function.hpp"
#include "bslab/quadrature.hpp"
#include "bslab/spectral.hpp"

#include <array>
#include <cmath>
#include <iosfwd>
#include <optional>
#include <vector>

namespace bslab {

struct FlowParams {
    double beta = 1e-3;   ///< in (0, 1e-3]
    double L = 1e6;       ///< >= 1/beta^2
    double dtau = 1e-3;
    double gamma = 0.5;   ///< spectral-cutoff exponent for the alpha coefficients
    double zhat = 1.0;
    /// Far-field freeze: outside this radius the state is pinned to the initial
    /// profile, blended smoothly over freeze_width.
    double freeze_radius = 11.0;
    double freeze_width = 5.0;
    bool theta_symmetric = false;
    /// Remove the projections onto the unstable eigenfunctions after every
    /// step. Forward integration of an ancient trajectory is exponentially
    /// unstable in those directions; filtering pins the run to the
    /// center-stable slice that the slow dynamics describes.
    bool filter_unstable = false;
    /// Switch time entering the graphical radius; unset means "no switch".
    std::optional<double> tau_s;

    void validate() const;
};

/// Graphical radius rho(tau): sqrt(|tau + 2 log zhat|) without a switch, scaled
/// smoothly up to sqrt(8) times that below the switch time.
double graphical_radius(double tau, double zhat, std::optional<double> tau_s);

/// Full nonlinear right-hand side of the renormalized graph evolution:
///   Lu - (1/2) rho u^2 - (rho u - (1/2) rho^2 u^2) u_tt - P/Q,
/// rho = (sqrt2 + u)^{-1}, P and Q the displayed gradient corrections.
GridFunction rhs_profile(const GridFunction& u);

/// Multiplication part F and differential part E of the linearized slope
/// evolution  d_tau u1 = L' u1 + E u1 + F u1.
struct SlopeOperators {
    explicit SlopeOperators(GridPtr grid)
        : f_multiplier(grid), e11(grid), e12(grid), e22(grid), e1t(grid), e2t(grid), ett(grid),
          e1(grid), e2(grid), et(grid) {}

    GridFunction f_multiplier;
    GridFunction e11, e12, e22, e1t, e2t, ett, e1, e2, et;

    /// Apply the differential part E to a field.
    GridFunction apply_e(const GridFunction& g) const;
};

SlopeOperators slope_operators(const GridFunction& u);

struct SpectralReport {
    double tau = 0.0;
    std::array<double, 7> alpha{};
    double w_plus = 0.0, w_zero = 0.0, w_minus = 0.0;
    double a_plus = 0.0;
    double omega = 0.0;
    double rho = 0.0;
};

void write_observables_csv_header(std::ostream& os);
void write_observables_csv_row(std::ostream& os, const SpectralReport& rep);

/// Time stepper for the profile evolution. Linear part handled implicitly in
/// the eigenbasis, nonlinearity explicitly; theta-independent data can run on
/// the reduced 2-D equation.
class FlowSim {
public:
    FlowSim(GridPtr grid, FlowParams params, const GridFunction& u0, double tau0);

    double tau() const { return tau_; }
    const FlowParams& params() const { return params_; }

    void step();
    void run_until(double tau_end);

    /// Current profile as a full grid function.
    GridFunction u() const;
    double min_radius_offset() const;  ///< min of sqrt(2) + u over the grid

    SpectralReport observables();

private:
    void step_2d();
    void step_3d();
    void check_state(const std::vector<double>& vals) const;

    GridPtr grid_;
    FlowParams params_;
    double tau_;
    double omega_ = 0.0;
    // 3-D state, or the theta-collapsed 2-D slice when theta_symmetric.
    std::vector<double> vals_;
    std::vector<double> init_vals_;
    std::vector<double> freeze_mask_;  ///< 1 inside, 0 outside
    std::vector<double> taper_;        ///< nonlinear-term trust mask
    struct FilterMode {
        std::vector<double> values;  ///< collapsed to the state layout
        double norm_squared;
    };
    std::vector<FilterMode> filter_modes_;
    std::vector<double> quad_weights_;  ///< measure weight per state entry
};

}  // namespace bslab
