#pragma once

#include <cstdint>
#include <limits>

namespace uqem {

/// Counter-based SplitMix64 stream. A stream is addressed by
/// (master seed, stream id, sample index), so any parallel schedule that
/// assigns sample k the stream derive(seed, stream, k) reproduces the serial
/// sequence exactly.
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t key) : state_(key) {}

    static Rng derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
        std::uint64_t k = mix(seed ^ 0x6a09e667f3bcc909ULL);
        k = mix(k ^ (stream + 0xbb67ae8584caa73bULL));
        k = mix(k ^ (index + 0x3c6ef372fe94f82bULL));
        return Rng(k);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        state_ += kGamma;
        return mix(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
    std::uint64_t state_;
};

}  // namespace uqem
