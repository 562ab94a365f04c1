#pragma once

#include <cstdint>
#include <random>

namespace coexsim {

// splitmix64: cheap, well-mixed stream derivation from a root seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// One independent engine per Monte Carlo trial.  Trials are merged in
// trial-index order, so results do not depend on scheduling.
inline std::mt19937_64 make_stream(std::uint64_t root_seed, std::uint64_t stream_id) {
    return std::mt19937_64(splitmix64(root_seed ^ splitmix64(stream_id + 1)));
}

// Draw an integer uniformly in [0, n).  std::uniform_int_distribution is
// implementation-defined, so roll our own to keep outputs reproducible.
inline std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

} // namespace coexsim
