#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace renal {

// 64-bit finalizer with full avalanche; the core of the counter scheme.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// Derives an independent stream key from a base seed and a path of indices
// (trial number, role, retry, ...). Pure function, so parallel workers can
// derive their streams without sharing state.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                           std::initializer_list<std::uint64_t> path) {
    std::uint64_t k = mix64(seed ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t v : path) {
        k = mix64(k ^ mix64(v + 0x9e3779b97f4a7c15ULL));
    }
    return k;
}

// Counter-based generator: output i is mix64(key + i * golden_gamma).
// The sequence for a given key is fixed, independent of call interleaving
// across other instances, and streams with distinct keys are independent
// for practical purposes.
class Rng {
public:
    explicit Rng(std::uint64_t seed)
        : key_(mix64(seed + 0x9e3779b97f4a7c15ULL) | 1ULL) {}

    std::uint64_t next_u64() {
        counter_ += 0x9e3779b97f4a7c15ULL;
        return mix64(key_ ^ counter_);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; safe as a log argument.
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second member of each pair is
    // cached, so draws stay deterministic per stream.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double a = 2.0 * std::numbers::pi * uniform();
        cached_ = r * std::sin(a);
        has_cached_ = true;
        return r * std::cos(a);
    }

    // Exponential with the given rate.
    double exponential(double rate) {
        return -std::log(uniform_pos()) / rate;
    }

    // New generator with an unrelated stream, keyed off this one's key.
    Rng split(std::uint64_t stream) const {
        return Rng(derive_seed(key_, {stream}));
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace renal
