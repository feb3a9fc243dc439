#include "updp/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace updp {

namespace {

inline std::uint64_t scramble(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

}  // namespace

std::uint64_t NoiseSource::next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return scramble(state_);
}

double NoiseSource::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double NoiseSource::uniform_open() {
    // (k + 0.5) / 2^53 for k in [0, 2^53) never touches 0 or 1.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::int64_t NoiseSource::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
    // Wrap-around subtraction handles spans wider than int64.
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1u;
    if (span == 0) return static_cast<std::int64_t>(next_u64());  // full 2^64 range
    const std::uint64_t reject_below = (0u - span) % span;
    for (;;) {
        const std::uint64_t x = next_u64();
        if (x >= reject_below)
            return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + x % span);
    }
}

double NoiseSource::laplace(double scale) {
    if (!(std::isfinite(scale) && scale > 0.0))
        throw std::invalid_argument("laplace: scale must be positive and finite");
    if (noiseless_) return 0.0;
    const double u = uniform_open();
    return u < 0.5 ? scale * std::log(2.0 * u) : -scale * std::log(2.0 * (1.0 - u));
}

std::uint64_t NoiseSource::mix(std::uint64_t seed, std::uint64_t index) {
    return scramble(seed + 0x9E3779B97F4A7C15ull * (index + 1u));
}

}  // namespace updp
