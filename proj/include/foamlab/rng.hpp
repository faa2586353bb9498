#pragma once

#include <cstdint>
#include <random>

namespace foamlab {

/// SplitMix64 finalizer. Used as the mixing primitive for every keyed stream.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-mode hash of (key, counter, lane). Pure, so the same triple yields
/// the same word in every process.
constexpr std::uint64_t keyed_hash(std::uint64_t key, std::uint64_t counter, std::uint64_t lane = 0)
{
    return splitmix64(splitmix64(key ^ splitmix64(counter)) + 0x632be59bd9b4e019ULL * (lane + 1));
}

/// Top 53 bits mapped to [0,1).
constexpr double unit_from_bits(std::uint64_t bits)
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Top 53 bits mapped to (0,1].
constexpr double open_closed_unit_from_bits(std::uint64_t bits)
{
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

__extension__ using uint128 = unsigned __int128;

/// Uniform integer in [0, bound) by 128-bit multiply-high.
constexpr std::uint64_t below_from_bits(std::uint64_t bits, std::uint64_t bound)
{
    return static_cast<std::uint64_t>((static_cast<uint128>(bits) * bound) >> 64);
}

/// Monte Carlo random source for one substream. Substreams are keyed by
/// (seed, stream) so chunked sample loops are reproducible for any worker count.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream)
        : engine_(keyed_hash(seed, stream, 0x5eed))
    {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform() { return unit_from_bits(engine_()); }
    std::uint64_t below(std::uint64_t bound) { return below_from_bits(engine_(), bound); }
    double normal() { return normal_(engine_); }
    double normal(double sigma) { return sigma * normal_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace foamlab
