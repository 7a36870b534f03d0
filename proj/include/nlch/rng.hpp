#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace nlch {

/// Deterministic random source. All draws go through explicit mappings so
/// that streams are reproducible across standard libraries and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1).
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace nlch
