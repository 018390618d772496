#pragma once

#include <cstdint>
#include <random>

namespace clmc {

/// Random stream type used by every sampler.
using Rng = std::mt19937_64;

/// One step of the SplitMix64 generator; advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Independent stream keyed on (seed, stream, substream).
///
/// The key is hashed through SplitMix64 and expanded into a seed sequence, so
/// neighbouring keys give unrelated engines. The result depends only on the key,
/// which lets batches be evaluated in any order or on any number of workers.
Rng make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream);

/// Derive a child seed from a parent seed and an index (used for per-config seeds).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform draw on the open interval (0, 1).
double open_unit(Rng& rng);

} // namespace clmc
