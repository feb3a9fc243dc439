#pragma once

#include <cstdint>

namespace updp {

// Seedable counter-based PRNG (splitmix64 core) feeding every randomized
// mechanism. Not cryptographically secure; the release noise of a production
// deployment would need a hardened entropy source.
//
// noiseless=true turns the *privacy* noise off for tracing: Laplace draws
// return exactly 0 and the exponential mechanism picks a max-score outcome
// deterministically. Sampling randomness (shuffles, subsampling, data
// generation) stays live so traces still exercise the real code paths.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed, bool noiseless = false)
        : state_(seed), noiseless_(noiseless) {}

    bool noiseless() const { return noiseless_; }

    std::uint64_t next_u64();

    // Uniform on [0,1), 53-bit resolution.
    double uniform();

    // Uniform on the open interval (0,1); safe to feed through log().
    double uniform_open();

    // Uniform integer on [lo, hi], both ends inclusive, rejection-sampled so
    // the distribution is exact.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    // One draw from Lap(scale) via the inverse-CDF transform of a uniform
    // draw. Returns exactly 0 in noiseless mode. scale must be positive.
    double laplace(double scale);

    // Deterministic seed derivation, used for per-trial streams:
    // hash(seed, index).
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t index);

private:
    std::uint64_t state_;
    bool noiseless_;
};

}  // namespace updp
