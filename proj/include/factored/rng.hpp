#pragma once
// Deterministic random draws on top of std::mt19937_64.
//
// The std::*_distribution adapters are implementation-defined (libstdc++ and
// libc++ produce different streams from the same engine), which would break
// frozen-value tests and cross-platform reproducibility of seeded benchmarks.
// All stochastic code in this library therefore draws through the explicit
// transforms below, which are pure functions of the engine output.

#include <cmath>
#include <cstdint>
#include <random>

namespace factored {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1): 53-bit mantissa, standard shift construction.
    double u01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on the open interval (0, 1); safe as a log/denominator argument.
    double u01_open() {
        return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
    }

    // Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * u01();
    }

    // Standard exponential via inverse CDF.
    double exponential() {
        return -std::log(u01_open());
    }

    // Standard normal via Box-Muller; the paired draw is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = u01_open();
        const double u2 = u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace factored
