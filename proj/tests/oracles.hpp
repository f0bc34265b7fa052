#pragma once
// Reference implementations used only by the tests. Deliberately naive:
// direct summation, no FFT, no shared code with the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline std::vector<cplx> direct_dft(std::span<const cplx> x) {
    const auto n = static_cast<int>(x.size());
    std::vector<cplx> X(n);
    for (int k = 0; k < n; ++k)
        for (int t = 0; t < n; ++t)
            X[k] += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * (static_cast<long long>(k) * t % n) / n);
    return X;
}

inline int mod(int a, int n) { return ((a % n) + n) % n; }

// Centered data bins -Ns/2+1 .. Ns/2 as storage indices.
inline std::vector<int> data_bins(int N, int Ns) {
    std::vector<int> out;
    for (int k = -Ns / 2 + 1; k <= Ns / 2; ++k) out.push_back(mod(k, N));
    return out;
}

inline bool is_data(int bin, int N, int Ns) {
    const int k = bin > N / 2 ? bin - N : bin;
    return k > -Ns / 2 && k <= Ns / 2;
}

// |(1/tau) sum_t exp(-j 2 pi delta t / N)|^2 by summation.
inline double xi_sq_sum(int delta, int tau, int N) {
    cplx s{};
    for (int t = 0; t < tau; ++t) s += std::polar(1.0, -2.0 * std::numbers::pi * delta * t / N);
    return std::norm(s / static_cast<double>(tau));
}

// |sum_l exp(-j 2 pi delta tau_l / N)|^2, i.e. L^2 f.
inline double l2f(int delta, std::span<const int> delays, int N) {
    cplx s{};
    for (int d : delays) s += std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(delta) * d / N);
    return std::norm(s);
}

// Admissible (k', k'') pair count for output bin `bin`.
inline double pair_count(int bin, int N, int Ns) {
    double c = 0.0;
    for (int a : data_bins(N, Ns))
        for (int b : data_bins(N, Ns))
            if (is_data(mod(a + b - bin, N), N, Ns)) c += 1.0;
    return c;
}

// Conditional distortion PSD straight from its defining double sum.
inline std::vector<double> conditional_psd(std::span<const int> delays, int N, int Ns, int M, double abs_alpha3_sq) {
    const auto L = static_cast<double>(delays.size());
    std::vector<double> out(N);
    const auto D = data_bins(N, Ns);
    for (int k = 0; k < N; ++k) {
        double s = 0.0;
        for (int a : D)
            for (int b : D) {
                if (!is_data(mod(a + b - k, N), N, Ns)) continue;
                const double t = l2f(k - a, delays, N) + l2f(k - b, delays, N);
                s += t * t;
            }
        out[k] = 2.0 * M * M * abs_alpha3_sq / (static_cast<double>(Ns) * Ns * L * L * L) * s;
    }
    return out;
}

// E_delays[ |S(da)|^2 |S(db)|^2 ], S(d) = sum_l exp(-j 2 pi d tau_l / N), with
// L i.i.d. delays uniform on {0..tau-1}. Exact: the four summation indices are
// split into every set partition; each block contributes the characteristic
// function at its signed frequency sum.
inline double moment4(int da, int db, int L, int tau, int N) {
    auto cf = [&](int d) {
        cplx s{};
        for (int t = 0; t < tau; ++t) s += std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(d) * t / N);
        return s / static_cast<double>(tau);
    };
    const int sign_freq[4] = {da, -da, db, -db};
    double total = 0.0;
    int block[4] = {0, 0, 0, 0};
    // restricted growth strings enumerate the 15 set partitions of 4 items
    for (int b1 = 0; b1 <= 1; ++b1)
        for (int b2 = 0; b2 <= std::max(b1, 0) + 1; ++b2)
            for (int b3 = 0; b3 <= std::max({b1, b2}) + 1; ++b3) {
                block[1] = b1;
                block[2] = b2;
                block[3] = b3;
                const int nb = std::max({b1, b2, b3}) + 1;
                if (nb > L) continue;
                double ways = 1.0;
                for (int i = 0; i < nb; ++i) ways *= L - i;
                cplx prod{1.0};
                for (int g = 0; g < nb; ++g) {
                    int f = 0;
                    for (int i = 0; i < 4; ++i)
                        if (block[i] == g) f += sign_freq[i];
                    prod *= cf(f);
                }
                total += ways * prod.real();
            }
    return total;
}

// Exact delay-averaged distortion PSD from the same double sum as
// conditional_psd, with the expectation taken analytically.
inline std::vector<double> exact_average_psd(int L, int tau, int N, int Ns, int M, double abs_alpha3_sq) {
    std::vector<double> out(N);
    const auto D = data_bins(N, Ns);
    for (int k = 0; k < N; ++k) {
        double s = 0.0;
        for (int a : D)
            for (int b : D) {
                if (!is_data(mod(a + b - k, N), N, Ns)) continue;
                s += moment4(k - a, k - a, L, tau, N) + moment4(k - b, k - b, L, tau, N) +
                     2.0 * moment4(k - a, k - b, L, tau, N);
            }
        out[k] = 2.0 * M * M * abs_alpha3_sq / (static_cast<double>(Ns) * Ns * L * L * L) * s;
    }
    return out;
}

}  // namespace oracle
