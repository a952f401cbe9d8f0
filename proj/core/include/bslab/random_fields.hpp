#pragma once

#include <cstdint>
#include <vector>

namespace bslab {

/// Deterministic 64-bit generator (splitmix64). Used instead of the standard
/// distributions so that identical seeds give identical streams everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    /// Uniform in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    /// Standard normal via Box-Muller.
    double normal();

    /// Derive an independent stream for sweep member `index`.
    static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Smooth random field t -> [-1, 1]: a low-frequency trigonometric series with
/// seeded coefficients, squashed through tanh so the bound is strict.
class BoundedField {
public:
    BoundedField() = default;
    BoundedField(Rng& rng, std::size_t n_modes, double min_freq, double max_freq);

    double operator()(double t) const;

private:
    std::vector<double> amp_, freq_, phase_;
    double scale_ = 1.0;
};

}  // namespace bslab
