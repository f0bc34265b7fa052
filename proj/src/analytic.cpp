#include "nlmimo/analytic.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "nlmimo/dft.hpp"

namespace nlmimo {
namespace {

int mod(long long a, int n) {
    const long long r = a % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

void check_dims(int N, int Ns) {
    if (N < 1 || Ns < 2 || Ns % 2 != 0 || Ns > N) throw ConfigError("need even Ns with 2 <= Ns <= N");
}

std::vector<bool> data_mask(int N, int Ns) {
    std::vector<bool> in(N);
    for (int b = 0; b < N; ++b) in[b] = is_in_band(to_centered(b, N), Ns);
    return in;
}

// Circular convolution (a * b)[k] = sum_p a[k - p] b[p] of two real sequences.
std::vector<double> circular_convolve(const std::vector<double>& a, const std::vector<double>& b) {
    const int N = static_cast<int>(a.size());
    const Dft fft(N);
    CVector A(a.begin(), a.end()), B(b.begin(), b.end());
    fft.forward(A, A);
    fft.forward(B, B);
    for (int i = 0; i < N; ++i) A[i] *= B[i];
    fft.inverse(A, A);
    std::vector<double> out(N);
    for (int i = 0; i < N; ++i) out[i] = A[i].real();
    return out;
}

std::vector<double> indicator(int N, int Ns) {
    const auto mask = data_mask(N, Ns);
    return {mask.begin(), mask.end()};
}

// A[s] = #{a in D : a + s in D}, exact integers.
std::vector<double> autocorrelation_count(int N, int Ns) {
    const auto ind = indicator(N, Ns);
    std::vector<double> flipped(N);
    for (int i = 0; i < N; ++i) flipped[i] = ind[mod(-i, N)];
    auto a = circular_convolve(flipped, ind);
    for (auto& v : a) v = std::round(v);
    return a;
}

std::vector<double> pair_sum_direct(const PairKernel& kern, int N, int Ns) {
    const auto in = data_mask(N, Ns);
    const int lo = -Ns / 2 + 1;
    std::vector<double> out(N, 0.0);
    for (int k = 0; k < N; ++k) {
        double acc = 0.0;
        for (int j = 0; j < Ns; ++j) {
            const int kp = lo + j;
            const int p = mod(k - kp, N);
            for (int i = 0; i < Ns; ++i) {
                const int kpp = lo + i;
                if (!in[mod(static_cast<long long>(kp) + kpp - k, N)]) continue;
                const int q = mod(k - kpp, N);
                acc += kern.single[p] + kern.single[q] + 2.0 * (kern.c0 + kern.c1 * kern.u[p] * kern.u[q]);
            }
        }
        out[k] = acc;
    }
    return out;
}

std::vector<double> pair_sum_fast(const PairKernel& kern, int N, int Ns) {
    const auto ind = indicator(N, Ns);
    const auto A = autocorrelation_count(N, Ns);

    // Pair count and the two single-offset terms are plain convolutions with
    // the data indicator: sum_p 1_D(k - p) A(p) g(p).
    auto C = circular_convolve(ind, A);
    for (auto& v : C) v = std::round(v);
    std::vector<double> weighted(N);
    for (int p = 0; p < N; ++p) weighted[p] = kern.single[p] * A[p];
    const auto T1 = circular_convolve(ind, weighted);

    // Coupled term: sum_p 1_D(k-p) u(p) sum_q u(q) 1_D(k-q) 1_D(k-p-q). The
    // inner range is an intersection of two arcs of D, summed with prefix sums.
    std::vector<double> T2(N, 0.0);
    if (kern.c1 != 0.0) {
        const int lo = -Ns / 2 + 1;
        std::vector<double> prefix(Ns + 1);
        for (int k = 0; k < N; ++k) {
            // v(i) = u(k - k''), k'' = lo + i
            prefix[0] = 0.0;
            for (int i = 0; i < Ns; ++i) prefix[i + 1] = prefix[i] + kern.u[mod(k - lo - i, N)];
            auto range = [&](int a, int b) { return a < b ? prefix[b] - prefix[a] : 0.0; };
            double acc = 0.0;
            for (int j = 0; j < Ns; ++j) {
                const int p = mod(k - lo - j, N);
                // admissible i: (i - p) mod N in [0, Ns)
                double inner = 0.0;
                if (p < Ns) inner += range(p, std::min(Ns, p + Ns));
                if (p + Ns > N) inner += range(0, std::min(Ns, p + Ns - N));
                acc += kern.u[p] * inner;
            }
            T2[k] = acc;
        }
    }

    std::vector<double> out(N);
    for (int k = 0; k < N; ++k)
        out[k] = C[k] == 0.0 ? 0.0 : 2.0 * T1[k] + 2.0 * kern.c0 * C[k] + 2.0 * kern.c1 * T2[k];
    return out;
}

double prefactor(int Ns, int L, int M, cplx alpha3) {
    const double l3 = static_cast<double>(L) * L * L;
    const double m2 = static_cast<double>(M) * M;
    return 2.0 * m2 * std::norm(alpha3) / (static_cast<double>(Ns) * Ns * l3);
}

std::vector<double> in_band_ratio(const SpectralDensity& num, double den) {
    std::vector<double> out;
    out.reserve(num.Ns());
    for (int i = 0; i < num.Ns(); ++i) out.push_back(num.at(i - num.Ns() / 2 + 1) / den);
    return out;
}

EvmSpectrum summarize(std::vector<double> per_bin) {
    EvmSpectrum e;
    double s = 0.0;
    for (double v : per_bin) s += v;
    e.power = s / static_cast<double>(per_bin.size());
    e.rms = std::sqrt(e.power);
    e.per_subcarrier = std::move(per_bin);
    return e;
}

}  // namespace

AnalyticModel analytic_model(const HermiteModel& m, double reference_power) {
    return {m.alpha1, m.alpha3 * reference_power};
}

double xi_sq(int delta, int tau_max, int N) {
    if (tau_max < 1 || N < 1) throw ConfigError("xi_sq: tau_max and N must be positive");
    const double x = std::numbers::pi * static_cast<double>(delta) / N;
    const double den = std::sin(x);
    if (std::abs(den) < 1e-9) return 1.0;
    const double r = std::sin(x * tau_max) / (tau_max * den);
    return r * r;
}

double f_exact(int delta, std::span<const int> delays, int N) {
    if (delays.empty()) throw ConfigError("f_exact: empty delay set");
    cplx s{};
    for (int t : delays) s += std::polar(1.0, -2.0 * std::numbers::pi * mod(static_cast<long long>(delta) * t, N) / N);
    const double L = static_cast<double>(delays.size());
    return std::norm(s) / (L * L);
}

std::size_t CorrelationKernels::index(int delta) const {
    if (delta <= -N || delta >= N) throw ConfigError("kernel offset outside (-N, N)");
    return static_cast<std::size_t>(delta + N - 1);
}

double CorrelationKernels::eps_ff_at(int d1, int d2) const {
    const double l2 = static_cast<double>(L) * L;
    return l2 + (l2 * l2 - l2) * xi2_at(d1) * xi2_at(d2);
}

CorrelationKernels build_kernels(int L, int tau_max, int N) {
    if (L < 1 || tau_max < 1 || N < 1) throw ConfigError("build_kernels: parameters must be positive");
    CorrelationKernels k;
    k.L = L;
    k.tau_max = tau_max;
    k.N = N;
    const double l = L, l2 = l * l, l4 = l2 * l2;
    const std::size_t n = 2 * static_cast<std::size_t>(N) - 1;
    k.xi2.resize(n);
    k.eps_f.resize(n);
    k.eps_f2.resize(n);
    for (int d = -N + 1; d < N; ++d) {
        const double x = xi_sq(d, tau_max, N);
        const auto i = k.index(d);
        k.xi2[i] = x;
        k.eps_f[i] = l + (l2 - l) * x;
        k.eps_f2[i] = l2 + (l4 - l2) * x * x;
    }
    return k;
}

std::vector<double> pair_sum(const PairKernel& kernel, int N, int Ns, SumMethod method) {
    check_dims(N, Ns);
    if (kernel.single.size() != static_cast<std::size_t>(N) || kernel.u.size() != static_cast<std::size_t>(N))
        throw ConfigError("pair_sum: kernels must have N entries");
    return method == SumMethod::direct ? pair_sum_direct(kernel, N, Ns) : pair_sum_fast(kernel, N, Ns);
}

std::vector<double> pair_count(int N, int Ns) {
    check_dims(N, Ns);
    auto C = circular_convolve(indicator(N, Ns), autocorrelation_count(N, Ns));
    for (auto& v : C) v = std::round(v);
    return C;
}

SpectralDensity distortion_psd_conditional(std::span<const int> delays, int L, int tau_max, int N, int Ns, int M,
                                           cplx alpha3, SumMethod method) {
    check_dims(N, Ns);
    if (static_cast<int>(delays.size()) != L) throw ConfigError("conditional PSD: need L delays");
    // L^2 f[p] = |sum_l exp(-j 2 pi p tau_l / N)|^2 is the power spectrum of the delay histogram.
    CVector hist(N);
    for (int t : delays) {
        if (t < 0 || t >= tau_max) throw ConfigError("conditional PSD: delay outside [0, tau_max)");
        hist[t] += 1.0;
    }
    const Dft fft(N);
    fft.forward(hist, hist);
    PairKernel kern;
    kern.u.resize(N);
    kern.single.resize(N);
    for (int p = 0; p < N; ++p) {
        kern.u[p] = std::norm(hist[p]);
        kern.single[p] = kern.u[p] * kern.u[p];
    }
    kern.c0 = 0.0;
    kern.c1 = 1.0;
    auto s = pair_sum(kern, N, Ns, method);
    const double pre = prefactor(Ns, L, M, alpha3);
    for (auto& v : s) v *= pre;
    return SpectralDensity(std::move(s), Ns);
}

SpectralDensity distortion_psd_avg(int L, int tau_max, int N, int Ns, int M, cplx alpha3, SumMethod method) {
    check_dims(N, Ns);
    if (L < 1 || tau_max < 1 || M < 1) throw ConfigError("distortion_psd_avg: parameters must be positive");
    const double l2 = static_cast<double>(L) * L, l4 = l2 * l2;
    PairKernel kern;
    kern.u.resize(N);
    kern.single.resize(N);
    for (int p = 0; p < N; ++p) {
        const double x = xi_sq(p, tau_max, N);
        kern.u[p] = x;
        kern.single[p] = l2 + (l4 - l2) * x * x;
    }
    kern.c0 = l2;
    kern.c1 = l4 - l2;
    auto s = pair_sum(kern, N, Ns, method);
    const double pre = prefactor(Ns, L, M, alpha3);
    for (auto& v : s) v *= pre;
    return SpectralDensity(std::move(s), Ns);
}

SpectralDensity distortion_psd_avg(const LinkConfig& cfg, const AnalyticModel& model) {
    return distortion_psd_avg(cfg.L, cfg.tau_max, cfg.N(), cfg.Ns, cfg.M, model.alpha3);
}

double desired_power(int M, int L, cplx alpha1) {
    if (M < 1 || L < 1) throw ConfigError("desired_power: M and L must be positive");
    return std::norm(alpha1) * static_cast<double>(M) * M * L;
}

double sdr(int k_centered, const LinkConfig& cfg, const AnalyticModel& model) {
    if (!is_in_band(k_centered, cfg.Ns)) throw ConfigError("sdr: subcarrier is out of band");
    // Both numerator and denominator scale as M^2; evaluate at M = 1 so the
    // result does not depend on M at all.
    const auto s = distortion_psd_avg(cfg.L, cfg.tau_max, cfg.N(), cfg.Ns, 1, model.alpha3);
    return desired_power(1, cfg.L, model.alpha1) / s.at(k_centered);
}

EvmSpectrum evm_theoretical(const LinkConfig& cfg, const AnalyticModel& model) {
    const auto s = distortion_psd_avg(cfg.L, cfg.tau_max, cfg.N(), cfg.Ns, 1, model.alpha3);
    return summarize(in_band_ratio(s, desired_power(1, cfg.L, model.alpha1)));
}

SpectralDensity isotropic_baseline(const LinkConfig& cfg, const AnalyticModel& model) {
    auto C = pair_count(cfg.N(), cfg.Ns);
    const double ns = cfg.Ns;
    const double scale = static_cast<double>(cfg.M) * cfg.L * 2.0 * std::norm(model.alpha3) / (ns * ns);
    for (auto& v : C) v *= scale;
    return SpectralDensity(std::move(C), cfg.Ns);
}

EvmSpectrum evm_isotropic(const LinkConfig& cfg, const AnalyticModel& model) {
    return summarize(in_band_ratio(isotropic_baseline(cfg, model), desired_power(cfg.M, cfg.L, model.alpha1)));
}

void write_csv(std::ostream& os, const SpectralDensity& psd) {
    os << "delta_or_k,value\n";
    const int N = psd.N();
    for (int k = -N / 2 + 1; k <= N / 2; ++k) os << k << ',' << psd.at(k) << '\n';
}

void write_csv(std::ostream& os, const CorrelationKernels& kernels, const std::vector<double>& values) {
    if (values.size() != 2 * static_cast<std::size_t>(kernels.N) - 1)
        throw ConfigError("kernel CSV: values must span offsets (-N, N)");
    os << "delta_or_k,value\n";
    for (int d = -kernels.N + 1; d < kernels.N; ++d) os << d << ',' << values[kernels.index(d)] << '\n';
}

}  // namespace nlmimo
