#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace aanet::rng {

// splitmix64; also the mixing function for deriving substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Stream-splitting rule: substream(seed, tag, a, b) = splitmix64 of the
// xor-folded inputs.  Every random draw in the project flows from one
// top-level seed through this function, so runs are reproducible and
// independent components get independent streams.
inline std::uint64_t substream(std::uint64_t seed, std::string_view tag,
                               std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t s = seed ^ fnv1a(tag);
    s ^= 0x9e3779b97f4a7c15ull * (a + 1);
    s ^= 0xc2b2ae3d27d4eb4full * (b + 1);
    std::uint64_t state = s;
    return splitmix64(state);
}

// Minimal xoshiro256**-free generator built on splitmix64 state advance.
// Self-contained so sequences do not depend on the standard library's
// distribution implementations.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [lo, hi] inclusive
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // Box-Muller; one draw per call, spare discarded to keep streams simple.
    double gaussian(double mean, double stddev) {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(2.0 * M_PI * u2);
    }

    // Rejection-sampled Gaussian truncated to [lower, +inf).
    double trunc_gaussian(double mean, double stddev, double lower) {
        for (;;) {
            const double x = gaussian(mean, stddev);
            if (x >= lower) return x;
        }
    }

private:
    std::uint64_t state_;
};

} // namespace aanet::rng
