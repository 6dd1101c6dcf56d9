#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "parex/types.hpp"

namespace parex {

// Portable sampling on top of mt19937_64: the standard distributions are
// implementation-defined, so reports would not be bit-stable across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    int sign() { return (engine_() >> 63) ? 1 : -1; }

    std::uint64_t next() { return engine_(); }

    Vec3 unit_vector() {
        for (;;) {
            Vec3 v{normal(), normal(), normal()};
            const double n = norm(v);
            if (n > 1e-12) return {v[0] / n, v[1] / n, v[2] / n};
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace parex
