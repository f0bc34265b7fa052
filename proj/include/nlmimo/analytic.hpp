#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "nlmimo/cmatrix.hpp"
#include "nlmimo/config.hpp"
#include "nlmimo/pa.hpp"
#include "nlmimo/spectral.hpp"

namespace nlmimo {

// Scaling of every closed form in this header: PSD values are per-bin powers
// in the units of the modulate() coefficients, i.e. with unit-energy symbols
// an antenna's input PSD on data bin k is |w_k|^2 and E|w_k|^2 = 1. In these
// units the received desired power per data bin is |alpha1|^2 M^2 L.
//
// The third-order gain entering the closed forms is normalized to that
// scale: alpha3_norm = alpha3 * sigma_ref^2, where sigma_ref^2 is the mean
// per-antenna PA input power and alpha3 the coefficient of x|x|^2 (see
// HermiteModel). The 1/Ns^2 prefactors below come from sigma_ref^2 ~ Ns in
// modulate() units.

struct AnalyticModel {
    cplx alpha1{1.0, 0.0};
    cplx alpha3{0.0, 0.0};  // normalized, see above
};

[[nodiscard]] AnalyticModel analytic_model(const HermiteModel& m, double reference_power);

/// |xi_delta|^2 = |(1/tau_max) sum_{tau<tau_max} exp(-j 2 pi delta tau / N)|^2,
/// the squared characteristic function of the uniform delay distribution.
[[nodiscard]] double xi_sq(int delta, int tau_max, int N);

/// |sum_l exp(-j 2 pi delta tau_l / N)|^2 / L^2 for one delay set.
[[nodiscard]] double f_exact(int delta, std::span<const int> delays, int N);

/// Subcarrier-correlation kernels over offsets delta in (-N, N).
struct CorrelationKernels {
    int L = 1;
    int tau_max = 1;
    int N = 1;
    std::vector<double> xi2;     // |xi|^2
    std::vector<double> eps_f;   // L + (L^2 - L) |xi|^2
    std::vector<double> eps_f2;  // L^2 + (L^4 - L^2) |xi|^4

    [[nodiscard]] std::size_t index(int delta) const;
    [[nodiscard]] double xi2_at(int delta) const { return xi2[index(delta)]; }
    [[nodiscard]] double eps_f_at(int delta) const { return eps_f[index(delta)]; }
    [[nodiscard]] double eps_f2_at(int delta) const { return eps_f2[index(delta)]; }
    /// L^2 + (L^4 - L^2) |xi_d1|^2 |xi_d2|^2
    [[nodiscard]] double eps_ff_at(int d1, int d2) const;
};

[[nodiscard]] CorrelationKernels build_kernels(int L, int tau_max, int N);

// Pair sums. For every output bin k (mod N) the closed forms need
//   S[k] = sum over k', k'' in D with (k' + k'' - k) mod N in D of
//          single(k-k') + single(k-k'') + 2 (c0 + c1 u(k-k') u(k-k''))
// where D is the set of data bins. Kernels are indexed by residue mod N.
struct PairKernel {
    std::vector<double> single;
    double c0 = 0.0;
    double c1 = 0.0;
    std::vector<double> u;
};

enum class SumMethod { direct, fast };

/// Result indexed by storage bin. `direct` is the O(N Ns^2) reference;
/// `fast` is O(N Ns + N log N).
[[nodiscard]] std::vector<double> pair_sum(const PairKernel& kernel, int N, int Ns, SumMethod method);

/// Number of admissible (k', k'') pairs for each output bin.
[[nodiscard]] std::vector<double> pair_count(int N, int Ns);

/// Received distortion PSD for a given delay set, large-array limit:
///   2 M^2 |alpha3|^2 / (Ns^2 L^3) sum (L^2 f[k-k'] + L^2 f[k-k''])^2.
[[nodiscard]] SpectralDensity distortion_psd_conditional(std::span<const int> delays, int L, int tau_max, int N,
                                                         int Ns, int M, cplx alpha3,
                                                         SumMethod method = SumMethod::fast);

/// Delay-averaged received distortion PSD:
///   2 M^2 |alpha3|^2 / (Ns^2 L^3) sum eps_f2[k-k'] + 2 eps_ff[k-k', k-k''] + eps_f2[k-k''].
[[nodiscard]] SpectralDensity distortion_psd_avg(int L, int tau_max, int N, int Ns, int M, cplx alpha3,
                                                 SumMethod method = SumMethod::fast);
[[nodiscard]] SpectralDensity distortion_psd_avg(const LinkConfig& cfg, const AnalyticModel& model);

/// |alpha1|^2 M^2 L, the received desired power on every data bin.
[[nodiscard]] double desired_power(int M, int L, cplx alpha1);

/// Per-bin SDR for data bin k (centered). Throws ConfigError for k out of band.
[[nodiscard]] double sdr(int k_centered, const LinkConfig& cfg, const AnalyticModel& model);

struct EvmSpectrum {
    std::vector<double> per_subcarrier;  // EVM power (1/SDR) in data order
    double power = 0.0;                  // mean over data bins
    double rms = 0.0;                    // sqrt(power)
};

[[nodiscard]] EvmSpectrum evm_theoretical(const LinkConfig& cfg, const AnalyticModel& model);

/// Received distortion if per-antenna distortions were uncorrelated:
/// M L times the per-antenna transmit distortion PSD 2 |alpha3|^2 C[k] / Ns^2
/// obtained from a flat unit input PSD.
[[nodiscard]] SpectralDensity isotropic_baseline(const LinkConfig& cfg, const AnalyticModel& model);
[[nodiscard]] EvmSpectrum evm_isotropic(const LinkConfig& cfg, const AnalyticModel& model);

/// CSV with columns delta_or_k,value. Spectra use centered k in ascending order.
void write_csv(std::ostream& os, const SpectralDensity& psd);
void write_csv(std::ostream& os, const CorrelationKernels& kernels, const std::vector<double>& values);

}  // namespace nlmimo
