#include "bslab/random_fields.hpp"

#include <cmath>

namespace bslab {

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.141592653589793 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

std::uint64_t Rng::derive_seed(std::uint64_t base, std::uint64_t index) {
    Rng mix(base ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
    return mix.next_u64();
}

BoundedField::BoundedField(Rng& rng, std::size_t n_modes, double min_freq, double max_freq) {
    amp_.resize(n_modes);
    freq_.resize(n_modes);
    phase_.resize(n_modes);
    double total = 0.0;
    for (std::size_t k = 0; k < n_modes; ++k) {
        amp_[k] = rng.normal();
        freq_[k] = rng.uniform(min_freq, max_freq);
        phase_[k] = rng.uniform(0.0, 2.0 * 3.141592653589793);
        total += std::fabs(amp_[k]);
    }
    scale_ = (total > 0.0) ? 1.5 / total : 1.0;
}

double BoundedField::operator()(double t) const {
    double s = 0.0;
    for (std::size_t k = 0; k < amp_.size(); ++k)
        s += amp_[k] * std::sin(freq_[k] * t + phase_[k]);
    return std::tanh(1.5 * scale_ * s);
}

}  // namespace bslab
