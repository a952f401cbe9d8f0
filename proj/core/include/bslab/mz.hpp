#pragma once

#include "bslab/ode_solve.hpp"
#include "bslab/random_fields.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bslab {

/// Envelope epsilon(tau) = C0 * |tau|^-gamma bounding the inequality coefficients,
/// with the horizon tau_star below which the estimates are claimed.
struct MZEnvelope {
    double c0 = 1.0;
    double gamma = 0.5;
    double tau_star = -60.0;

    double epsilon(double tau) const;
};

/// Sampled trajectory of one of the ODE systems, in the time variable named by
/// `time_label` (tau or sigma).
struct Trajectory {
    std::string system;
    std::string time_label;
    std::vector<std::string> components;
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    bool blew_up = false;
    double blowup_time = 0.0;

    std::size_t size() const { return times.size(); }
    void write_csv(std::ostream& os) const;
};

/// Concrete coefficient functions realizing the differential inequalities:
/// smooth seeded fields with |c(tau)| <= 1, later scaled by the envelope.
struct CoefficientRealization {
    bool zero = true;
    BoundedField c_plus, c_zero, c_minus;

    static CoefficientRealization zeros() { return {}; }
    static CoefficientRealization random(std::uint64_t seed);
};

/// d/dtau U+ = U+ + c+(tau) eps(tau) S, |d/dtau U0| likewise, d/dtau U- = -U- + ...,
/// S = U+ + U0 + U-. Components clamped at zero. Integrates from tau0 to tau1 in
/// either direction.
Trajectory integrate_u_system(const MZEnvelope& env, const CoefficientRealization& realization,
                              const std::array<double, 3>& u0, double tau0, double tau1,
                              std::size_t n_samples = 400);

enum class MZVerdict { UnstableDominates, NeutralDominates, Violation, Inconclusive };

std::string to_string(MZVerdict v);

struct TrichotomyReport {
    MZVerdict verdict = MZVerdict::Inconclusive;
    /// Interpolated single crossing of U+ = |tau|^(-gamma/2) U0, when present.
    std::optional<double> crossing_tau;
    bool stable_bound_ok = false;    ///< U- <= 2 eps (U0 + U+) at all samples
    double stable_bound_excess = 0;  ///< max U- / (2 eps (U0+U+)) over samples
    bool f_monotone_ok = false;      ///< U- - 2 eps (U+ + U0) nonincreasing where >= 0
    std::string detail;
};

/// Classify a sampled U-system trajectory against the quantitative dichotomy.
TrichotomyReport verify_mz_trichotomy(const Trajectory& traj, const MZEnvelope& env);

/// Spectral-coefficient system: d a1 = -sqrt8 (a1^2+a3^2) + e1, etc., with
/// |e_i| <= C (|a|^2 |tau|^(-gamma/4) + |tau|^-10).
Trajectory integrate_alpha(const MZEnvelope& env, const CoefficientRealization& realization,
                           const std::array<double, 3>& alpha0, double tau0, double tau1,
                           std::size_t n_samples = 400);

/// Evaluate the alpha right-hand side at one state (used for pointwise checks).
std::array<double, 3> alpha_rhs(const MZEnvelope& env, const CoefficientRealization& realization,
                                double tau, const std::array<double, 3>& a);

/// Perturbation entering the dimensionless (x,y) system, |p_i| <= amplitude * e^(-gamma sigma/4).
struct XYPerturbation {
    bool zero = true;
    double amplitude = 1.0;
    double gamma = 0.5;
    BoundedField f1, f2;

    static XYPerturbation none() { return {}; }
    static XYPerturbation random(std::uint64_t seed, double amplitude, double gamma);
    std::array<double, 2> operator()(double sigma) const;
};

/// dx/dsigma = x + y - 2x^2 + p1, dy/dsigma = 2y - 2xy + p2.
Trajectory integrate_xy(const std::array<double, 2>& xy0, double sigma0, double sigma1,
                        const XYPerturbation& pert, std::size_t n_samples = 400);

struct ConfinementReport {
    bool ok = true;
    std::optional<double> exit_sigma;
    double worst_upper_slack = 0.0;  ///< max (y - x^2) e^{gamma sigma / 4}
    double worst_lower_slack = 0.0;  ///< max (-y) e^{gamma sigma / 4}
};

/// Check sqrt(2) kappa / 3 <= x <= 2 sqrt(2) and -C e^{-gs/4} <= y <= x^2 + C e^{-gs/4}.
ConfinementReport check_xy_confinement(const Trajectory& traj, double kappa, double gamma,
                                       double slack_c = 10.0);

struct FixedPoint {
    double x = 0, y = 0;
    std::array<double, 2> eigenvalues{};
    std::string type;
};

/// Zeros of (x + y - 2x^2, 2y - 2xy) with Jacobian classification, found by
/// damped Newton from a coarse seed grid; duplicates merged at distance 1e-8.
std::vector<FixedPoint> classify_fixed_points();

struct ZBoundReport {
    double measured_c_quarter = 0.0;  ///< sup |z| e^{gamma sigma / 4}
    double measured_c_eighth = 0.0;   ///< sup |z| e^{gamma sigma / 8}
    bool decay_bound_ok = false;      ///< measured_c_eighth finite vs. requested constant
};

/// dz/dsigma = (1 - 2 x(sigma)) z + q(sigma).
Trajectory integrate_z(const std::function<double(double)>& x_of_sigma,
                       const std::function<double(double)>& q_of_sigma, double z0, double sigma0,
                       double sigma1, std::size_t n_samples = 400);

ZBoundReport z_bound_report(const Trajectory& ztraj, double gamma, double c_limit);

struct SwitchTime {
    bool never = false;  ///< the smallness condition holds on the whole range
    double tau_s = 0.0;  ///< meaningful when never == false
};

/// Infimum of tau such that |alpha(tau')| <= kappa0 / |tau'| for all tau' in
/// [tau, tau_star); returns tau_star when the condition fails immediately.
SwitchTime switch_time(const Trajectory& alpha_traj, double kappa0);

}  // namespace bslab
