#pragma once

#include <cmath>
#include <cstdint>

namespace sme {

/// Small counter-friendly PRNG (splitmix64). Used everywhere the harness
/// needs reproducible streams: a stream is fully determined by its seed, and
/// per-item substreams are derived by hashing (seed, index), which keeps
/// parallel Monte-Carlo loops bit-identical to the serial ones.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (deterministic across platforms).
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::uint64_t next_below(std::uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    /// Derives an independent substream for (seed, index) pairs.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
        Rng h(seed ^ (0xA076'1D64'78BD'642FULL + index * 0xE703'7ED1'A0B4'28DBULL));
        return h.next_u64();
    }

private:
    std::uint64_t state_;
};

}  // namespace sme
