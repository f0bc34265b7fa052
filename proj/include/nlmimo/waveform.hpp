#pragma once

#include <span>

#include "nlmimo/cmatrix.hpp"
#include "nlmimo/config.hpp"
#include "nlmimo/rng.hpp"

namespace nlmimo {

/// Data symbol i in [0, Ns) rides on centered subcarrier k = i - Ns/2 + 1.
[[nodiscard]] constexpr int data_subcarrier(int i, int Ns) noexcept { return i - Ns / 2 + 1; }

struct OfdmSymbol {
    CVector data;  // Ns unit-energy QAM symbols
    CMatrix time;  // M x N precoded time samples
};

/// Square QAM alphabet scaled to unit average energy. Throws ConfigError for
/// orders other than 4, 16, 64, 256.
[[nodiscard]] CVector qam_constellation(int order);

/// Ns i.i.d. symbols drawn uniformly from the constellation of cfg.qam_order.
[[nodiscard]] CVector draw_qam(const LinkConfig& cfg, Rng& rng);

/// Oversampled OFDM synthesis
///   x_m[n] = sum_{k data} w(m, k) a_k exp(j 2 pi k n / N),
/// evaluated exactly (no 1/N): out-of-band bins carry nothing. With this
/// scaling ||x_m||^2 = N * sum_k |w(m,k) a_k|^2, so the expected per-sample
/// power of antenna m is sum_k |w(m,k)|^2 for unit-energy symbols.
[[nodiscard]] CMatrix modulate(std::span<const cplx> data, const CMatrix& precoder, const LinkConfig& cfg);

/// Analysis matching modulate: bin k of the result is (1/N) sum_n y[n]
/// exp(-j 2 pi k n / N), i.e. the coefficient that multiplied exp(j 2 pi k n/N).
[[nodiscard]] CVector demodulate(std::span<const cplx> y, const LinkConfig& cfg);

[[nodiscard]] OfdmSymbol make_symbol(const CMatrix& precoder, const LinkConfig& cfg, Rng& rng);

}  // namespace nlmimo
