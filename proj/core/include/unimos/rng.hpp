#pragma once

#include <cmath>
#include <cstdint>

namespace unimos {

/// Counter-based random stream: draw i is a pure function of (seed, i), so a
/// stream can be reconstructed at any position. This is what makes
/// checkpoint/resume reproduce the exact remaining draws of an uninterrupted
/// run.
class RngStream {
public:
    RngStream() = default;
    explicit RngStream(std::uint64_t seed, std::uint64_t position = 0)
        : seed_(seed), pos_(position) {}

    /// Derives an independent stream from (seed, tag, index). Used to give
    /// each purpose (init, batch sampling, weak/strong draws, dropout) and
    /// each step its own stream.
    static RngStream derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0) {
        std::uint64_t s = mix(seed + 0x9e3779b97f4a7c15ull * (tag + 1));
        s = mix(s + 0x9e3779b97f4a7c15ull * (index + 1));
        return RngStream(s);
    }

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ull * (pos_++ + 1);
        return mix(z);
    }

    /// Uniform double in [0, 1).
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [lo, hi] inclusive.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via Box-Muller; consumes exactly two draws.
    double normal() {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t position() const { return pos_; }

private:
    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_ = 0;
    std::uint64_t pos_ = 0;
};

/// Stream purpose tags. Keeping them in one place avoids accidental overlap.
namespace rng_tag {
constexpr std::uint64_t kInit = 1;
constexpr std::uint64_t kBatch = 2;
constexpr std::uint64_t kWeak = 3;
constexpr std::uint64_t kStrong1 = 4;
constexpr std::uint64_t kStrong2 = 5;
constexpr std::uint64_t kFeatureMask = 6;
constexpr std::uint64_t kPhantom = 7;
}  // namespace rng_tag

}  // namespace unimos
