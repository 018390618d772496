#include "clmc/rng.hpp"

#include <array>

namespace clmc {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
{
    std::uint64_t state = seed;
    std::uint64_t key = splitmix64(state);
    state = key ^ stream;
    key = splitmix64(state);
    state = key ^ substream;

    std::array<std::uint32_t, 8> words{};
    for (std::size_t i = 0; i < words.size(); i += 2) {
        const std::uint64_t v = splitmix64(state);
        words[i] = static_cast<std::uint32_t>(v);
        words[i + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t state = seed;
    state = splitmix64(state) ^ index;
    return splitmix64(state);
}

double open_unit(Rng& rng)
{
    // 52 random mantissa bits, offset by half a step: never 0, never 1.
    const std::uint64_t bits = rng() >> 12;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

} // namespace clmc
