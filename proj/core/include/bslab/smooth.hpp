#pragma once

#include <algorithm>

namespace bslab {

/// Quintic smoothstep: 0 for s <= 0, 1 for s >= 1, C^2 across the joins.
inline double smoothstep(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

/// Radial cutoff chi: 1 on [0,1], 0 on [2,inf), quintic smoothstep in between.
inline double chi_cutoff(double r) {
    return 1.0 - smoothstep(r - 1.0);
}

/// Slope-localization cutoff eta: 1 for z <= 7/5, 0 for z >= 141/100.
inline double eta_cutoff(double z) {
    return 1.0 - smoothstep((z - 1.40) / 0.01);
}

/// Graphical-radius switch factor: sqrt(8) for zeta <= 3/2, 1 for zeta >= 2,
/// monotone smoothstep in between.
inline double lambda_switch(double zeta) {
    constexpr double sqrt8 = 2.8284271247461903;
    return sqrt8 + (1.0 - sqrt8) * smoothstep(2.0 * (zeta - 1.5));
}

}  // namespace bslab
