#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "nlmimo/analytic.hpp"
#include "nlmimo/dft.hpp"
#include "nlmimo/experiment.hpp"
#include "nlmimo/mc.hpp"
#include "nlmimo/waveform.hpp"

namespace nlmimo {
namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

LinkConfig small_config() {
    LinkConfig c;
    c.M = 32;
    c.Ns = 64;
    c.mu = 2;
    c.L = 2;
    c.tau_max = 8;
    c.trials = 40;
    c.seed = 7;
    return c;
}

bool check_dft() {
    const int n = 48;
    Rng rng = seeded_rng(11, stream_id(0, StreamPurpose::oracle));
    CVector x(n);
    for (auto& v : x) v = rng.complex_gaussian();
    const CVector X = dft(x);
    double err = 0.0;
    for (int k = 0; k < n; ++k) {
        cplx s{};
        for (int t = 0; t < n; ++t) s += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * k * t / n);
        err = std::max(err, std::abs(s - X[k]));
    }
    const CVector back = idft(X);
    for (int t = 0; t < n; ++t) err = std::max(err, std::abs(back[t] - x[t]));
    return err < 1e-9;
}

bool check_kernels() {
    // E over two independent uniform delays, enumerated exhaustively.
    const int N = 128, tau = 8, L = 2;
    const auto k = build_kernels(L, tau, N);
    double err = 0.0;
    for (int delta = -N + 1; delta < N; delta += 5) {
        double mean = 0.0;
        for (int a = 0; a < tau; ++a)
            for (int b = 0; b < tau; ++b) {
                const int d[2] = {a, b};
                mean += f_exact(delta, d, N);
            }
        mean *= static_cast<double>(L) * L / (tau * tau);
        err = std::max(err, std::abs(mean - k.eps_f_at(delta)));
    }
    return err < 1e-9 && k.eps_f_at(0) == L * L && k.eps_f2_at(0) == L * L * L * L;
}

bool check_pair_sum() {
    const int N = 128, Ns = 64;
    const auto k = build_kernels(3, 16, N);
    PairKernel pk;
    pk.single.resize(N);
    pk.u.resize(N);
    for (int b = 0; b < N; ++b) {
        pk.single[b] = k.eps_f2_at(b);
        pk.u[b] = k.xi2_at(b);
    }
    pk.c0 = 9.0;
    pk.c1 = 72.0;
    const auto fast = pair_sum(pk, N, Ns, SumMethod::fast);
    const auto direct = pair_sum(pk, N, Ns, SumMethod::direct);
    return max_abs_diff(fast, direct) <= 1e-9 * max_abs(direct);
}

bool check_round_trip() {
    LinkConfig c = small_config();
    Rng rng = seeded_rng(c.seed, stream_id(0, StreamPurpose::oracle));
    const auto ch = draw_channel(c, rng);
    const auto w = mrt_precoder(ch);
    const auto data = draw_qam(c, rng);
    const auto x = modulate(data, w, c);
    const auto X = demodulate(x.row(0), c);
    double err = 0.0;
    for (int i = 0; i < c.Ns; ++i) {
        const int b = from_centered(data_subcarrier(i, c.Ns), c.N());
        err = std::max(err, std::abs(X[b] - w(0, b) * data[i]));
    }
    return err < 1e-9;
}

bool check_cubic_fit() {
    const cplx c{0.05, 0.02};
    const double sigma = 0.8;
    Rng rng = seeded_rng(3, stream_id(0, StreamPurpose::oracle));
    const auto fit = fit_hermite(as_nonlinearity(PolynomialPa::cubic(c)), sigma, 200'000, rng);
    const cplx a1 = 1.0 - 2.0 * c * sigma * sigma;
    return std::abs(fit.model.alpha1 - a1) <= 4.0 * fit.alpha1_stderr + 1e-12 &&
           std::abs(fit.model.alpha3 + c) <= 4.0 * fit.alpha3_stderr + 1e-12;
}

bool check_mc_desired(std::ostream& log) {
    LinkConfig c = small_config();
    const auto models = fit_link_models(c, McOptions{.threads = 1, .fit_samples = 200'000});
    const auto est = estimate(c, models, McOptions{.threads = 1});
    const double want = desired_power(c.M, c.L, models.hermite.alpha1);
    const double got = est.psd_desired.in_band_mean();
    log << "  desired in-band mean " << got << " vs " << want << '\n';
    return std::abs(got / want - 1.0) < 0.05;
}

bool check_mc_distortion(std::ostream& log) {
    // Flat channel: one tap, so the closed form has no averaging gap.
    LinkConfig c = small_config();
    c.L = 1;
    c.tau_max = 1;
    const auto models = fit_link_models(c, McOptions{.threads = 1, .fit_samples = 200'000});
    const auto est = estimate(c, models, McOptions{.threads = 1});
    const auto an = distortion_psd_avg(c, analytic_model(models.hermite, models.reference_power));
    const double in_db = to_db(est.psd_distortion.in_band_mean() / an.in_band_mean());
    const double oob_db = to_db(est.psd_distortion.out_of_band_mean() / an.out_of_band_mean());
    log << "  distortion MC/analytic in-band " << in_db << " dB, OOB " << oob_db << " dB\n";
    return std::abs(in_db) < 1.0 && std::abs(oob_db) < 1.0;
}

bool check_determinism() {
    LinkConfig c = small_config();
    c.trials = 10;
    const auto models = fit_link_models(c, McOptions{.threads = 1, .fit_samples = 50'000});
    const auto a = estimate(c, models, McOptions{.threads = 1});
    const auto b = estimate(c, models, McOptions{.threads = 3});
    return a.psd_total.bins() == b.psd_total.bins() && a.evm_power == b.evm_power;
}

}  // namespace

bool run_selftest(std::ostream& log) {
    struct Check {
        const char* name;
        bool (*fn)(std::ostream&);
    };
    const Check checks[] = {
        {"dft matches direct summation", [](std::ostream&) { return check_dft(); }},
        {"kernels match delay enumeration", [](std::ostream&) { return check_kernels(); }},
        {"fast pair sum matches direct", [](std::ostream&) { return check_pair_sum(); }},
        {"modulate/demodulate round trip", [](std::ostream&) { return check_round_trip(); }},
        {"cubic device Hermite fit", [](std::ostream&) { return check_cubic_fit(); }},
        {"MC desired power", check_mc_desired},
        {"MC distortion, flat channel", check_mc_distortion},
        {"thread-count invariance", [](std::ostream&) { return check_determinism(); }},
    };
    bool all = true;
    for (const auto& c : checks) {
        bool ok = false;
        try {
            ok = c.fn(log);
        } catch (const std::exception& e) {
            log << "  error: " << e.what() << '\n';
        }
        log << (ok ? "PASS " : "FAIL ") << c.name << '\n';
        all = all && ok;
    }
    log << (all ? "selftest passed" : "selftest FAILED") << '\n';
    return all;
}

}  // namespace nlmimo
