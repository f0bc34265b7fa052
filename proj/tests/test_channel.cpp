#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlmimo/channel.hpp"
#include "nlmimo/dft.hpp"
#include "oracles.hpp"

using namespace nlmimo;

namespace {

LinkConfig cfg(int M, int L, int tau_max, int Ns = 64, int mu = 2) {
    LinkConfig c;
    c.M = M;
    c.L = L;
    c.tau_max = tau_max;
    c.Ns = Ns;
    c.mu = mu;
    return c;
}

}  // namespace

TEST_CASE("single zero-delay tap gives a flat channel") {
    Rng rng = seeded_rng(1, 0);
    const auto ch = draw_channel(cfg(4, 1, 1), rng);
    REQUIRE(ch.delays() == std::vector<int>{0});
    for (int m = 0; m < 4; ++m)
        for (int b = 0; b < ch.N(); ++b) CHECK(std::abs(ch.freq()(m, b) - ch.taps()(m, 0)) < 1e-12);
}

TEST_CASE("freq equals the DFT of the tap-delay profile") {
    Rng rng = seeded_rng(2, 0);
    const auto c = cfg(3, 5, 40);
    const auto ch = draw_channel(c, rng);
    for (int m = 0; m < 3; ++m) {
        CVector profile(c.N());
        for (int l = 0; l < 5; ++l) profile[ch.delays()[l]] += ch.taps()(m, l);
        const auto ref = oracle::direct_dft(profile);
        for (int b = 0; b < c.N(); ++b) CHECK(std::abs(ref[b] - ch.freq()(m, b)) < 1e-10);
    }
}

TEST_CASE("per-entry channel power averages to L") {
    const auto c = cfg(1, 20, 100, 256, 4);
    double p = 0.0;
    const int reps = 10'000;
    for (int r = 0; r < reps; ++r) {
        Rng rng = seeded_rng(3, stream_id(r, StreamPurpose::channel));
        p += std::norm(draw_channel(c, rng).freq()(0, 37));
    }
    CHECK(std::abs(p / reps / 20.0 - 1.0) < 0.03);
}

TEST_CASE("delays are uniform on {0, ..., tau_max-1}") {
    const int tau = 10, draws = 100'000;
    const auto c = cfg(1, 1, tau);
    std::vector<int> hist(tau);
    Rng rng = seeded_rng(4, 0);
    for (int i = 0; i < draws; ++i) ++hist[draw_channel(c, rng).delays()[0]];
    for (int h : hist) CHECK(std::abs(h / (draws / double(tau)) - 1.0) < 0.02);
}

TEST_CASE("MRT: flat unit channel gives unit precoder") {
    CMatrix taps(2, 1);
    taps(0, 0) = taps(1, 0) = 1.0;
    const ChannelRealization ch(taps, {0}, 1, 16);
    const auto w = mrt_precoder(ch);
    for (int m = 0; m < 2; ++m)
        for (int b = 0; b < 16; ++b) CHECK(std::abs(w(m, b) - cplx(1.0)) < 1e-14);
}

TEST_CASE("MRT: w h is |h|^2 / sqrt(L), real and nonnegative") {
    Rng rng = seeded_rng(5, 0);
    const auto ch = draw_channel(cfg(4, 6, 30), rng);
    const auto w = mrt_precoder(ch);
    for (int m = 0; m < 4; ++m)
        for (int b = 0; b < ch.N(); ++b) {
            const cplx p = w(m, b) * ch.freq()(m, b);
            CHECK(std::abs(p.imag()) < 1e-12);
            CHECK(p.real() == doctest::Approx(std::norm(ch.freq()(m, b)) / std::sqrt(6.0)));
        }
}

TEST_CASE("MRT: precoder entries have unit mean power") {
    const auto c = cfg(1, 8, 50);
    double p = 0.0;
    const int reps = 10'000;
    for (int r = 0; r < reps; ++r) {
        Rng rng = seeded_rng(6, stream_id(r, StreamPurpose::channel));
        p += std::norm(mrt_precoder(draw_channel(c, rng))(0, 5));
    }
    CHECK(std::abs(p / reps - 1.0) < 0.02);
}

TEST_CASE("propagate is circular convolution with the taps") {
    Rng rng = seeded_rng(7, 0);
    const auto c = cfg(2, 3, 20, 16, 2);
    const auto ch = draw_channel(c, rng);
    CMatrix x(2, c.N());
    for (auto& v : x.flat()) v = rng.complex_gaussian();
    const auto y = propagate(ch, x);
    // In frequency: Y = sum_m H_m X_m.
    const auto Y = dft(y);
    for (int b = 0; b < c.N(); ++b) {
        cplx want{};
        for (int m = 0; m < 2; ++m) want += ch.freq()(m, b) * dft(x.row(m))[b];
        CHECK(std::abs(Y[b] - want) < 1e-9);
    }
}

TEST_CASE("constructor rejects out-of-range delays and bad shapes") {
    CMatrix taps(1, 2);
    CHECK_THROWS_AS(ChannelRealization(taps, {0, 5}, 5, 16), ConfigError);
    CHECK_THROWS_AS(ChannelRealization(taps, {0, -1}, 5, 16), ConfigError);
    CHECK_THROWS_AS(ChannelRealization(taps, {0}, 5, 16), ConfigError);
}

TEST_CASE("JSON fixture round trip") {
    Rng rng = seeded_rng(8, 0);
    const auto ch = draw_channel(cfg(2, 3, 10), rng);
    const nlohmann::json j = ch;
    const auto back = j.get<ChannelRealization>();
    CHECK(back.delays() == ch.delays());
    for (int m = 0; m < 2; ++m)
        for (int b = 0; b < ch.N(); ++b) CHECK(std::abs(back.freq()(m, b) - ch.freq()(m, b)) < 1e-12);
}
