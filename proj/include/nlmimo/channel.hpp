#pragma once

#include <vector>

#include <json.hpp>

#include "nlmimo/cmatrix.hpp"
#include "nlmimo/config.hpp"
#include "nlmimo/rng.hpp"

namespace nlmimo {

/// One frequency-selective Rayleigh realization of the M-antenna channel.
///
/// taps(m, l) is the gain of path l at antenna m; all antennas share the path
/// delays. The frequency response is
///   freq(m, k) = sum_l taps(m, l) exp(-j 2 pi k delays[l] / N)
/// stored DC-first over the N oversampled bins.
class ChannelRealization {
public:
    ChannelRealization() = default;
    /// Throws ConfigError if a delay falls outside [0, tau_max) or dimensions disagree.
    ChannelRealization(CMatrix taps, std::vector<int> delays, int tau_max, int N);

    [[nodiscard]] int M() const noexcept { return static_cast<int>(taps_.rows()); }
    [[nodiscard]] int L() const noexcept { return static_cast<int>(taps_.cols()); }
    [[nodiscard]] int N() const noexcept { return static_cast<int>(freq_.cols()); }
    [[nodiscard]] int tau_max() const noexcept { return tau_max_; }

    [[nodiscard]] const CMatrix& taps() const noexcept { return taps_; }
    [[nodiscard]] const std::vector<int>& delays() const noexcept { return delays_; }
    [[nodiscard]] const CMatrix& freq() const noexcept { return freq_; }

private:
    CMatrix taps_;
    std::vector<int> delays_;
    int tau_max_ = 1;
    CMatrix freq_;
};

/// I.i.d. CN(0,1) taps and i.i.d. uniform delays on {0, ..., tau_max-1}
/// (repeats allowed).
[[nodiscard]] ChannelRealization draw_channel(const LinkConfig& cfg, Rng& rng);

/// MRT precoder w(m, k) = conj(h_k^(m)) / sqrt(L) for every bin.
[[nodiscard]] CMatrix mrt_precoder(const ChannelRealization& ch);

/// Circular multipath propagation of per-antenna time signals to the single
/// receive antenna: y[n] = sum_m sum_l taps(m,l) x_m[(n - delays[l]) mod N].
[[nodiscard]] CVector propagate(const ChannelRealization& ch, const CMatrix& x);

// Fixture format: {"M", "L", "tau_max", "N", "delays": [...], "taps": [re, im, ...]}
// with taps row-major (antenna-major), real and imaginary parts interleaved.
void to_json(nlohmann::json& j, const ChannelRealization& ch);
void from_json(const nlohmann::json& j, ChannelRealization& ch);

}  // namespace nlmimo
