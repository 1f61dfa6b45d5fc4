//SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace msdi {

// splitmix64 finalizer. Used both to whiten user seeds and to derive
// independent child seeds for parallel work items.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic seed for work item `index` of a task seeded with `seed`.
// Results are identical no matter how the items are scheduled.
inline std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// mt19937_64 wrapper producing portable variates. std::uniform_real_distribution
// is implementation-defined, so draws are built from raw bits instead; output
// is bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    // Uniform on the open interval (0,1).
    double uniform01() {
        const std::uint64_t bits = engine_() >> 11;  // top 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    // Uniform on {0, 1, ..., n-1} by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace msdi
