#pragma once

#include <cstdint>

namespace ltml {

/// Counter-based deterministic RNG. The stream is a pure function of
/// (seed, counter), so the same seed yields a bit-identical sequence on
/// every platform. Mixing is the splitmix64 finalizer over
/// seed + counter * golden-gamma.
class RngState {
public:
    explicit RngState(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) {
        // 128-bit multiply rejection-free mapping; bias is < 2^-64 * n,
        // negligible at the sizes used here.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Standard normal via Box-Muller; consumes two uniforms per call.
    double normal();

    /// Derive an independent stream (e.g. per subsystem) from this seed.
    static RngState derive(std::uint64_t seed, std::uint64_t stream_id) {
        RngState mixer(seed ^ (0xD1B54A32D192ED03ULL * (stream_id + 1)));
        return RngState(mixer.next_u64());
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace ltml
