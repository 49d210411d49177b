#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gbe {

using NodeId = int;

// Positions and edge lengths are snapped to this grid (~1 micrometer).
// Every edge length is then an integer multiple of 2^-20 with far fewer
// than 53 significant bits, so sums of edge lengths along paths are exact
// doubles and independent of summation order.
inline constexpr double kMetricGrid = 1.0 / (1 << 20);

inline double quantize_metric(double x) {
    return static_cast<double>(static_cast<long long>(x / kMetricGrid + (x >= 0 ? 0.5 : -0.5))) * kMetricGrid;
}

// splitmix64; used to derive independent seeds from one root seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Deterministic RNG with fixed output transforms. std::distributions are
// implementation-defined, so uniform/normal are implemented here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x853c49e6748fea9bull) {}

    std::uint64_t next() {
        // xorshift64* — small, fast, reproducible everywhere.
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    double uniform() {  // [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int n) {  // [0, n)
        if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
        return static_cast<int>(next() % static_cast<std::uint64_t>(n));
    }

    double normal() {
        // Box-Muller, no caching so the stream layout is obvious.
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    Rng fork(std::uint64_t salt) const { return Rng(mix_seed(state_ ^ mix_seed(salt))); }

private:
    std::uint64_t state_;
};

}  // namespace gbe
