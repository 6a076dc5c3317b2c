// Seeded random streams. One stream per concern (mobility, traffic, radio,
// per-protocol jitter), each derived from the master seed by a fixed label so
// subsystems draw independently.
//
// The engine is std::mt19937_64 (bit-exact by the standard); distributions are
// implemented here because the standard library's are not portable.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace manet {

namespace detail {

constexpr uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

class RngStream {
public:
    RngStream(uint64_t master_seed, std::string_view label, uint64_t index = 0)
        : eng_(detail::splitmix64(master_seed ^ detail::fnv1a(label) ^
                                  detail::splitmix64(index + 0x51ed2701a9e5c33bULL))) {}

    uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(eng_() % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 eng_;
};

} // namespace manet
