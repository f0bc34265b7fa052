#include "nlmimo/channel.hpp"

#include <cmath>

#include "nlmimo/dft.hpp"

namespace nlmimo {

ChannelRealization::ChannelRealization(CMatrix taps, std::vector<int> delays, int tau_max, int N)
    : taps_(std::move(taps)), delays_(std::move(delays)), tau_max_(tau_max), freq_(taps_.rows(), N) {
    if (tau_max < 1) throw ConfigError("channel: tau_max must be >= 1");
    if (N < tau_max) throw ConfigError("channel: N must be >= tau_max");
    if (delays_.size() != taps_.cols()) throw ConfigError("channel: one delay per tap column required");
    for (int d : delays_)
        if (d < 0 || d >= tau_max) throw ConfigError("channel: delay outside [0, tau_max)");

    // Scatter taps onto the delay grid (repeated delays add) and transform.
    const Dft fft(N);
    CVector grid(static_cast<std::size_t>(N));
    for (std::size_t m = 0; m < taps_.rows(); ++m) {
        std::fill(grid.begin(), grid.end(), cplx{});
        for (std::size_t l = 0; l < delays_.size(); ++l) grid[delays_[l]] += taps_(m, l);
        fft.forward(grid, freq_.row(m));
    }
}

ChannelRealization draw_channel(const LinkConfig& cfg, Rng& rng) {
    require_valid(cfg);
    CMatrix taps(cfg.M, cfg.L);
    for (auto& t : taps.flat()) t = rng.complex_gaussian();
    std::vector<int> delays(cfg.L);
    for (auto& d : delays) d = rng.uniform_int(0, cfg.tau_max - 1);
    return ChannelRealization(std::move(taps), std::move(delays), cfg.tau_max, cfg.N());
}

CMatrix mrt_precoder(const ChannelRealization& ch) {
    CMatrix w(ch.M(), ch.N());
    const double s = 1.0 / std::sqrt(static_cast<double>(ch.L()));
    const auto src = ch.freq().flat();
    auto dst = w.flat();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::conj(src[i]) * s;
    return w;
}

CVector propagate(const ChannelRealization& ch, const CMatrix& x) {
    if (static_cast<int>(x.rows()) != ch.M() || static_cast<int>(x.cols()) != ch.N())
        throw ConfigError("propagate: signal must be M x N");
    const int N = ch.N();
    CVector y(static_cast<std::size_t>(N));
    for (int m = 0; m < ch.M(); ++m) {
        const auto xm = x.row(m);
        for (int l = 0; l < ch.L(); ++l) {
            const cplx g = ch.taps()(m, l);
            const int d = ch.delays()[l];
            for (int n = 0; n < N; ++n) y[n] += g * xm[(n - d + N) % N];
        }
    }
    return y;
}

void to_json(nlohmann::json& j, const ChannelRealization& ch) {
    std::vector<double> taps;
    taps.reserve(2 * ch.taps().flat().size());
    for (const auto& t : ch.taps().flat()) {
        taps.push_back(t.real());
        taps.push_back(t.imag());
    }
    j = nlohmann::json{{"M", ch.M()},     {"L", ch.L()},           {"tau_max", ch.tau_max()},
                       {"N", ch.N()},     {"delays", ch.delays()}, {"taps", taps}};
}

void from_json(const nlohmann::json& j, ChannelRealization& ch) {
    const int M = j.at("M").get<int>();
    const int L = j.at("L").get<int>();
    const auto taps = j.at("taps").get<std::vector<double>>();
    if (M < 1 || L < 1 || taps.size() != static_cast<std::size_t>(2 * M * L))
        throw ConfigError("channel fixture: taps must hold 2*M*L values");
    CMatrix t(M, L);
    auto flat = t.flat();
    for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = {taps[2 * i], taps[2 * i + 1]};
    ch = ChannelRealization(std::move(t), j.at("delays").get<std::vector<int>>(), j.at("tau_max").get<int>(),
                            j.at("N").get<int>());
}

}  // namespace nlmimo
