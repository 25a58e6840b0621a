#pragma once

// Seeded RNG helpers. Distribution sampling is hand-rolled on top of
// std::mt19937_64 so streams are stable across standard libraries and can be
// serialized into checkpoints.

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace ssfn {

using Rng = std::mt19937_64;

/// Unbiased integer in [0, n) via rejection sampling.
inline std::uint64_t rand_below(Rng& rng, std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double rand_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller (one value per call; no cached state).
inline double rand_normal(Rng& rng) {
    double u1 = rand_unit(rng);
    while (u1 <= 0.0) u1 = rand_unit(rng);
    const double u2 = rand_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// In-place Fisher-Yates shuffle with a stable tap order.
template <typename Vec>
void shuffle_deterministic(Vec& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rand_below(rng, i));
        std::swap(v[i - 1], v[j]);
    }
}

inline std::string rng_save(const Rng& rng) {
    std::ostringstream os;
    os << rng;
    return os.str();
}

inline void rng_restore(Rng& rng, const std::string& state) {
    std::istringstream is(state);
    is >> rng;
}

}  // namespace ssfn
