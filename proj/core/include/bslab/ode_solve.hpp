#pragma once

#include <functional>
#include <vector>

namespace bslab {

/// Right-hand side f(t, y, dydt). State dimension is fixed by the initial value.
using OdeRhs = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

struct OdeOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double initial_step = 1e-3;
    double max_step = 1.0;
    std::size_t max_steps = 2'000'000;
    /// When > 0, integrate with this fixed step and no error control.
    double fixed_step = 0.0;
    /// Clamp state components at zero from below after every step.
    bool clamp_nonnegative = false;
    /// Abort when any |y_i| exceeds this bound (blow-up detection).
    double blowup_threshold = 1e12;
};

struct OdeSolution {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    bool blew_up = false;
    double blowup_time = 0.0;
    std::size_t steps_taken = 0;
};

/// Dormand-Prince 5(4) from t0 to t1 (either direction), sampling the solution
/// at `n_samples` evenly spaced output times (dense output by cubic Hermite).
OdeSolution integrate_dopri5(const OdeRhs& rhs, std::vector<double> y0, double t0, double t1,
                             std::size_t n_samples, const OdeOptions& opts = {});

}  // namespace bslab
