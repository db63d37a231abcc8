#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pisa {

// Error taxonomy, mapped to process exit codes by the CLI:
//   UsageError -> 2, DataError -> 3, NumericError -> 4.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : UsageError {
    using UsageError::UsageError;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Splittable counter-based RNG (splitmix64 core). Children are derived from
// the stream's own seed and a tag, never from consumption state, so adding a
// draw somewhere cannot shift unrelated streams.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n) {
        // Rejection sampling keeps the distribution exact for any n.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller. Spare value discarded: two u64 draws
    // per call, which keeps the draw count input-independent.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Derive an independent child stream. Same (seed, tag) -> same child.
    [[nodiscard]] Rng child(std::uint64_t tag) const {
        std::uint64_t z = seed_ ^ (tag * 0xD6E8FEB86659FD93ull + 0xA5A5A5A5A5A5A5A5ull);
        z = (z ^ (z >> 32)) * 0xD6E8FEB86659FD93ull;
        z = (z ^ (z >> 32)) * 0xD6E8FEB86659FD93ull;
        return Rng(z ^ (z >> 32));
    }

    [[nodiscard]] Rng child(std::string_view label) const { return child(fnv1a(label)); }

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

private:
    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xCBF29CE484222325ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001B3ull;
        }
        return h;
    }

    std::uint64_t seed_;
    std::uint64_t state_;
};

} // namespace pisa
