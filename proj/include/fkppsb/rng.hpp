#pragma once

// Self-contained random number generation.  All stochastic output of the
// simulators is a pure function of (seed, replicate index, step index), so the
// generators are implemented here rather than taken from <random>: the
// standard distributions are implementation-defined and would break the
// bit-reproducibility contract across library versions.
//
// Layout:
//   * splitmix64      -- stream used for seeding and for key mixing
//   * mix64(a, b)     -- collision-resistant combination of two 64-bit keys
//   * Xoshiro256pp    -- main generator (xoshiro256++ by Blackman/Vigna)
//   * Rng             -- Xoshiro256pp plus uniform / gaussian / exponential
//                        helpers (Marsaglia polar method for gaussians)

#include <cmath>
#include <cstdint>
#include <limits>

namespace fkppsb {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Deterministically derive a fresh 64-bit key from a (key, index) pair.
// Used to give every replicate and every noise panel its own stream.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    std::uint64_t state = a + 0x9E3779B97F4A7C15ull * (b + 1);
    std::uint64_t z = splitmix64_next(state);
    return z ^ splitmix64_next(state);
}

class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64_next(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_.next(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() { return 1.0 - uniform(); }

    // Standard normal via the Marsaglia polar method; second value cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double a, b, r2;
        do {
            a = 2.0 * uniform() - 1.0;
            b = 2.0 * uniform() - 1.0;
            r2 = a * a + b * b;
        } while (r2 >= 1.0 || r2 == 0.0);
        const double f = std::sqrt(-2.0 * std::log(r2) / r2);
        spare_ = b * f;
        have_spare_ = true;
        return a * f;
    }

    // Exponential with the given rate; rate == 0 yields +infinity.
    double exponential(double rate) {
        if (rate <= 0.0) return std::numeric_limits<double>::infinity();
        return -std::log(uniform_pos()) / rate;
    }

private:
    Xoshiro256pp gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stream for replicate `rep` of an estimator keyed by `master`.
inline Rng replicate_rng(std::uint64_t master, std::uint64_t rep) {
    return Rng(mix64(master, rep));
}

} // namespace fkppsb
