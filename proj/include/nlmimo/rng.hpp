#pragma once

#include <cstdint>
#include <random>

#include "nlmimo/cmatrix.hpp"

namespace nlmimo {

/// What a random stream is used for; combined with a trial index so channel,
/// data and fitting draws are reproducible independently of each other.
enum class StreamPurpose : std::uint64_t {
    channel = 1,
    data = 2,
    pa_fit = 3,
    oracle = 4,
};

[[nodiscard]] constexpr std::uint64_t stream_id(std::uint64_t trial, StreamPurpose purpose) noexcept {
    return (trial << 8) | static_cast<std::uint64_t>(purpose);
}

/// Deterministic random stream keyed by (seed, stream_id).
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    /// Circularly symmetric complex Gaussian with E|z|^2 = 1.
    cplx complex_gaussian();
    double gaussian();
    /// Uniform integer on the closed range [lo, hi].
    int uniform_int(int lo, int hi);
    double uniform();

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

[[nodiscard]] Rng seeded_rng(std::uint64_t seed, std::uint64_t stream);

}  // namespace nlmimo
