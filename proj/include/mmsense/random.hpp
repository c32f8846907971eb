// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace mmsense {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Child seed for an independent stream. Each tag is mixed and folded into the
/// running state with splitmix64, so {a, b} and {b, a} give different streams.
inline constexpr std::uint64_t derive_seed(std::uint64_t parent, std::span<const std::uint64_t> tags) {
    std::uint64_t s = mix64(parent);
    for (std::uint64_t t : tags) s = mix64(s ^ mix64(t + 0x632be59bd9b4e019ULL));
    return s;
}

inline constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> tags) {
    return derive_seed(parent, std::span<const std::uint64_t>(tags.begin(), tags.size()));
}

// Stream tags used across the pipeline.
enum class Stream : std::uint64_t {
    arrangement = 1,
    snapshot = 2,
    split = 3,
    init = 4,
    shuffle = 5,
    reaction = 6,
    episode = 7,
    critic = 8,
    repetition = 9,
};

inline constexpr std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

}  // namespace mmsense
