#pragma once

#include <cstdint>
#include <random>

namespace dynsam {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; also used to derive seeds from seeds.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Cheap counter-based generator for per-sample substreams. Seeding a
// mt19937_64 per (step, sample) is too slow for the inner selection loop.
struct SplitMix64 {
    using result_type = std::uint64_t;

    std::uint64_t state = 0;

    explicit constexpr SplitMix64(std::uint64_t seed) : state(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    result_type operator()() { return mix64(state++); }
};

// Substream identity: (master seed, stream tag, step, sample id) -> seed.
// Independent of evaluation order, so parallel and serial scoring agree
// bit for bit.
inline constexpr std::uint64_t kThompsonStream = 0x74686F6DULL;
inline constexpr std::uint64_t kSelectionStream = 0x73656C65ULL;
inline constexpr std::uint64_t kDapoStream = 0x6461706FULL;
inline constexpr std::uint64_t kEnvStream = 0x656E7669ULL;

inline constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream,
                                              std::uint64_t step, std::uint64_t id) {
    std::uint64_t s = mix64(master ^ mix64(stream));
    s = mix64(s ^ mix64(step));
    return mix64(s ^ mix64(id));
}

inline constexpr SplitMix64 substream(std::uint64_t master, std::uint64_t stream,
                                      std::uint64_t step, std::uint64_t id) {
    return SplitMix64(substream_seed(master, stream, step, id));
}

// One Beta(a, b) variate via the gamma ratio. Clamped to the open unit
// interval so downstream code can rely on p in (0, 1).
template <class URBG>
double draw_beta(URBG& rng, double a, double b) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    double v = (x + y > 0.0) ? x / (x + y) : 0.5;
    constexpr double lo = 1e-300;
    const double hi = 1.0 - 1e-16;
    if (v < lo)
        v = lo;
    if (v > hi)
        v = hi;
    return v;
}

}  // namespace dynsam
