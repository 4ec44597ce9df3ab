#pragma once

#include <cstdint>
#include <random>

namespace paflow {

// Seeded uniform sampler. Draws are derived from raw mt19937_64 bits rather
// than std::uniform_real_distribution so the stream does not depend on the
// standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t bits() { return gen_(); }
    // integer in [0, n)
    std::uint64_t index(std::uint64_t n) { return n ? gen_() % n : 0; }

private:
    std::mt19937_64 gen_;
};

}  // namespace paflow
