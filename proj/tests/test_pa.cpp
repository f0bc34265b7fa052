#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlmimo/pa.hpp"

using namespace nlmimo;

namespace {

CVector gaussian(std::size_t n, double sigma, std::uint64_t seed) {
    Rng rng = seeded_rng(seed, stream_id(0, StreamPurpose::oracle));
    CVector x(n);
    for (auto& v : x) v = sigma * rng.complex_gaussian();
    return x;
}

}  // namespace

TEST_CASE("Rapp: zero in, zero out") {
    CHECK(apply_rapp(cplx{}, PaParams{}) == cplx{});
}

TEST_CASE("Rapp: saturates at r_o") {
    const PaParams p{1.0, 0.7, 2.0};
    CHECK(rapp_amplitude(1e6, p) == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(rapp_amplitude(1e12, PaParams{1.0, 0.7, 0.5}) == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("Rapp: p=1 at unit amplitude gives 1/sqrt2") {
    CHECK(rapp_amplitude(1.0, PaParams{1.0, 1.0, 1.0}) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    const double hand = 1.0 * std::pow(1.0 + std::pow(1.0 / 1.5, 6.0), -1.0 / 6.0);
    CHECK(rapp_amplitude(0.5, PaParams{2.0, 1.5, 3.0}) == doctest::Approx(hand).epsilon(1e-14));
}

TEST_CASE("Rapp: phase preserved, amplitude monotone and bounded") {
    const PaParams p{};
    const cplx x = std::polar(0.8, 1.1);
    CHECK(std::arg(apply_rapp(x, p)) == doctest::Approx(1.1));
    double prev = 0.0;
    for (double r = 0.01; r < 50.0; r *= 1.1) {
        const double a = rapp_amplitude(r, p);
        CHECK(a > prev);
        CHECK(a < p.r_o);
        prev = a;
    }
}

TEST_CASE("H3: closed values") {
    CHECK(hermite_h3(cplx{}) == cplx{});
    CHECK(hermite_h3(cplx{1.0}) == cplx{-1.0});
    CHECK(std::abs(hermite_h3(cplx{0.0, 2.0}) - cplx{0.0, 4.0}) < 1e-15);
}

TEST_CASE("H3 is orthogonal to z under CN(0,1)") {
    const auto z = gaussian(1'000'000, 1.0, 1);
    cplx m{};
    double m2 = 0.0;
    for (auto v : z) {
        const cplx t = v * std::conj(hermite_h3(v));
        m += t;
        m2 += std::norm(t);
    }
    const double n = static_cast<double>(z.size());
    const cplx mean = m / n;
    const double se = std::sqrt((m2 / n - std::norm(mean)) / n);
    CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("fit: identity device") {
    Rng rng = seeded_rng(2, 0);
    const auto f = fit_hermite(as_nonlinearity(PolynomialPa::identity()), 0.5, 100'000, rng);
    CHECK(std::abs(f.model.alpha1 - cplx(1.0)) <= 3.0 * f.alpha1_stderr + 1e-12);
    CHECK(std::abs(f.model.alpha3) <= 3.0 * f.alpha3_stderr + 1e-12);
    CHECK(f.residual < 1e-3);
}

TEST_CASE("fit: cubic device recovers 1 - 2c sigma^2 and -c") {
    for (const cplx c : {cplx(0.1, 0.0), cplx(0.03, -0.04)}) {
        for (double sigma : {0.4, 1.0}) {
            Rng rng = seeded_rng(3, 0);
            const auto f = fit_hermite(as_nonlinearity(PolynomialPa::cubic(c)), sigma, 200'000, rng);
            CHECK(std::abs(f.model.alpha1 - (1.0 - 2.0 * c * sigma * sigma)) <= 3.0 * f.alpha1_stderr);
            CHECK(std::abs(f.model.alpha3 + c) <= 3.0 * f.alpha3_stderr);
        }
    }
}

TEST_CASE("fit: Rapp at 8 dB back-off (regression fixture)") {
    const PaParams p{};
    const double sigma = std::sqrt(backoff_power(p, 8.0));
    Rng rng = seeded_rng(1, stream_id(1ull << 40, StreamPurpose::pa_fit));
    const auto f = fit_hermite(as_nonlinearity(RappPa{p}), sigma, 1'000'000, rng);
    CHECK(std::isfinite(f.model.alpha1.real()));
    CHECK(std::abs(f.model.alpha3) * sigma * sigma < 0.1 * std::abs(f.model.alpha1));
    CHECK(f.model.alpha1.real() == doctest::Approx(0.9697).epsilon(2e-3));
    CHECK(f.model.alpha3.real() == doctest::Approx(-0.1582).epsilon(2e-2));
    CHECK(std::abs(f.model.alpha1.imag()) < 5.0 * f.alpha1_stderr);
}

TEST_CASE("fit: argument checks") {
    Rng rng = seeded_rng(4, 0);
    const auto id = as_nonlinearity(PolynomialPa::identity());
    CHECK_THROWS_AS((void)fit_hermite(id, 0.0, 20'000, rng), ConfigError);
    CHECK_THROWS_AS((void)fit_hermite(id, 1.0, 9'999, rng), ConfigError);
    const Nonlinearity bad = [](cplx) { return cplx(std::nan(""), 0.0); };
    CHECK_THROWS_AS((void)fit_hermite(bad, 1.0, 20'000, rng), std::domain_error);
}

TEST_CASE("decompose: zero alpha3 gives zero distortion") {
    const auto x = gaussian(1000, 1.0, 5);
    const auto dec = decompose(x, HermiteModel{0.9, 0.0, 1.0});
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(dec.d[i] == cplx{});
        CHECK(dec.u[i] == 0.9 * x[i]);
    }
}

TEST_CASE("decompose: u and d are uncorrelated for Gaussian input") {
    const double sigma = 0.6;
    const auto x = gaussian(400'000, sigma, 6);
    const auto dec = decompose(x, HermiteModel{cplx(0.97, 0.01), cplx(-0.16, 0.02), sigma});
    cplx m{};
    double m2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const cplx t = dec.u[i] * std::conj(dec.d[i]);
        m += t;
        m2 += std::norm(t);
    }
    const double n = static_cast<double>(x.size());
    CHECK(std::abs(m / n) < 3.0 * std::sqrt(m2 / n / n));
}

TEST_CASE("decompose: exact for a cubic device") {
    const cplx c{0.08, 0.01};
    const double sigma = 0.7;
    const PolynomialPa pa = PolynomialPa::cubic(c);
    const auto x = gaussian(1000, sigma, 7);
    const auto dec = decompose(x, HermiteModel{1.0 - 2.0 * c * sigma * sigma, -c, sigma});
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(dec.u[i] + dec.d[i] - pa(x[i])) < 1e-14);
}

TEST_CASE("back-off sets the mean input power") {
    const auto x = gaussian(1000, 3.0, 8);
    CHECK(apply_backoff(x, PaParams{}, 0.0).sigma_x == doctest::Approx(1.0));
    CHECK(backoff_power(PaParams{1.0, 1.0, 2.0}, 10.0) == doctest::Approx(0.1));
    const auto a = apply_backoff(x, PaParams{1.0, 1.0, 2.0}, 6.0);
    const auto b = apply_backoff(x, PaParams{1.0, 2.0, 2.0}, 6.0);
    CHECK(b.sigma_x == doctest::Approx(2.0 * a.sigma_x));
    double p = 0.0;
    for (auto v : a.signal) p += std::norm(v);
    CHECK(p / 1000.0 == doctest::Approx(a.sigma_x * a.sigma_x));
    CHECK_THROWS_AS((void)apply_backoff(CVector(4), PaParams{}, 3.0), ConfigError);
}

TEST_CASE("HermiteModel JSON round trip") {
    const HermiteModel m{cplx(0.9, 0.1), cplx(-0.2, 0.05), 0.4};
    const nlohmann::json j = m;
    const auto back = j.get<HermiteModel>();
    CHECK(back.alpha1 == m.alpha1);
    CHECK(back.alpha3 == m.alpha3);
    CHECK(back.sigma_x == m.sigma_x);
}
