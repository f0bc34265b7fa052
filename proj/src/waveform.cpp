#include "nlmimo/waveform.hpp"

#include <cmath>

#include "nlmimo/dft.hpp"
#include "nlmimo/spectral.hpp"

namespace nlmimo {

CVector qam_constellation(int order) {
    if (!is_supported_qam_order(order)) throw ConfigError("unsupported QAM order " + std::to_string(order));
    const int side = static_cast<int>(std::lround(std::sqrt(order)));
    const double scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
    CVector pts;
    pts.reserve(order);
    for (int i = 0; i < side; ++i)
        for (int q = 0; q < side; ++q)
            pts.emplace_back((2 * i - side + 1) * scale, (2 * q - side + 1) * scale);
    return pts;
}

CVector draw_qam(const LinkConfig& cfg, Rng& rng) {
    const CVector pts = qam_constellation(cfg.qam_order);
    CVector out(cfg.Ns);
    for (auto& a : out) a = pts[rng.uniform_int(0, cfg.qam_order - 1)];
    return out;
}

CMatrix modulate(std::span<const cplx> data, const CMatrix& precoder, const LinkConfig& cfg) {
    const int N = cfg.N();
    if (static_cast<int>(data.size()) != cfg.Ns) throw ConfigError("modulate: need Ns data symbols");
    if (precoder.cols() != static_cast<std::size_t>(N)) throw ConfigError("modulate: precoder must have N columns");

    const Dft fft(N);
    CMatrix x(precoder.rows(), N);
    for (std::size_t m = 0; m < precoder.rows(); ++m) {
        auto row = x.row(m);
        for (int i = 0; i < cfg.Ns; ++i) {
            const int b = from_centered(data_subcarrier(i, cfg.Ns), N);
            row[b] = precoder(m, b) * data[i];
        }
        fft.inverse(row, row);
        for (auto& v : row) v *= static_cast<double>(N);
    }
    return x;
}

CVector demodulate(std::span<const cplx> y, const LinkConfig& cfg) {
    CVector out = dft(y, cfg.N());
    const double s = 1.0 / cfg.N();
    for (auto& v : out) v *= s;
    return out;
}

OfdmSymbol make_symbol(const CMatrix& precoder, const LinkConfig& cfg, Rng& rng) {
    OfdmSymbol sym;
    sym.data = draw_qam(cfg, rng);
    sym.time = modulate(sym.data, precoder, cfg);
    return sym;
}

}  // namespace nlmimo
