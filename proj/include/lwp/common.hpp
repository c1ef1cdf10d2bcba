#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace lwp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad inputs: malformed config values, inconsistent matrices, out-of-range ids.
struct ValidationError : Error {
    using Error::Error;
};

/// Malformed input file; message carries the line number.
struct ParseError : Error {
    using Error::Error;
};

/// Optimization diverged (NaN loss); message carries the epoch index.
struct TrainingError : Error {
    using Error::Error;
};

/// Attack loop hit a non-finite gradient; message carries the iteration index.
struct AttackError : Error {
    using Error::Error;
};

/// Seeded RNG with pinned draw algorithms so that identical seeds produce
/// identical streams on every platform (std distributions are
/// implementation-defined, which would break cross-compiler reproducibility).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform index in [0, n) via rejection sampling (no modulo bias).
    std::size_t index(std::size_t n) {
        if (n == 0) throw ValidationError("Rng::index: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % n);
    }

    /// Standard normal via Box-Muller (cosine branch only).
    double normal() {
        double u1;
        do {
            u1 = unit();
        } while (u1 <= 0.0);
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    bool coin() { return (gen_() & 1u) != 0; }

private:
    std::mt19937_64 gen_;
};

/// Derives a child seed from a parent seed and a stream id (splitmix64 mix).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// FNV-1a 64-bit hash, used to stamp configs into result metadata.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string to_hex(std::uint64_t x) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[x & 0xf];
        x >>= 4;
    }
    return out;
}

}  // namespace lwp
