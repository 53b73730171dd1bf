#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace infobatch::rng {

// Philox4x32-10 counter-based generator, as specified by Random123.
// Every draw is a pure function of (key, counter), so per-sample decisions
// do not depend on iteration order or thread count.

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

Counter philox4x32_10(Counter ctr, Key key) noexcept;

/// SplitMix64 finalizer. Used to derive independent keys from a seed and a tag.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag) noexcept {
    return mix64(mix64(seed) ^ (tag * 0xD6E8FEB86659FD93ULL));
}

// Domain tags so unrelated consumers of one seed never share a stream.
namespace tag {
inline constexpr std::uint64_t prune = 0x70727565;     // "prue"
inline constexpr std::uint64_t shuffle = 0x73687566;   // "shuf"
inline constexpr std::uint64_t dataset = 0x64617461;   // "data"
inline constexpr std::uint64_t init = 0x696e6974;      // "init"
inline constexpr std::uint64_t trial = 0x7472696c;     // "tril"
inline constexpr std::uint64_t split = 0x73706c74;     // "splt"
}  // namespace tag

/// 64 random bits at position (stream, index) under `key`.
std::uint64_t bits64(std::uint64_t key, std::uint64_t stream, std::uint64_t index) noexcept;

/// Uniform double in [0, 1) with 53 random bits.
inline double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform01(std::uint64_t key, std::uint64_t stream, std::uint64_t index) noexcept {
    return to_unit(bits64(key, stream, index));
}

/// Sequential view over one (key, stream) pair. Satisfies UniformRandomBitGenerator,
/// but the helpers below should be preferred over <random> distributions, whose
/// output is implementation-defined.
class Stream {
public:
    using result_type = std::uint64_t;

    Stream(std::uint64_t key, std::uint64_t stream) noexcept : key_(key), stream_(stream) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return bits64(key_, stream_, index_++); }

    double uniform() noexcept { return to_unit((*this)()); }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; one pair of uniforms per call.
    double normal() noexcept;

    /// Unbiased integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept;

    std::uint64_t position() const noexcept { return index_; }

private:
    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t index_ = 0;
};

}  // namespace infobatch::rng
