#include "nlmimo/rng.hpp"

#include <cmath>

namespace nlmimo {
namespace {

std::seed_seq make_seq(std::uint64_t seed, std::uint64_t stream) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    return std::seed_seq{lo(seed), hi(seed), lo(stream), hi(stream), 0x6e6c6d69u};
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    auto seq = make_seq(seed, stream);
    engine_.seed(seq);
}

cplx Rng::complex_gaussian() {
    static const double s = 1.0 / std::sqrt(2.0);
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return {s * re, s * im};
}

double Rng::gaussian() { return normal_(engine_); }

int Rng::uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

double Rng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

Rng seeded_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(seed, stream); }

}  // namespace nlmimo
