#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nlmimo/analytic.hpp"
#include "nlmimo/channel.hpp"
#include "nlmimo/config.hpp"
#include "nlmimo/pa.hpp"
#include "nlmimo/rng.hpp"
#include "nlmimo/spectral.hpp"

namespace nlmimo {

/// Which PA output is propagated as "distortion".
enum class DistortionPath {
    third_order,  // d = alpha3 sigma^3 H3(x / sigma) from the Hermite model
    exact_pa,     // d = psi(x) - a x, all orders; a is each antenna's in-sample Bussgang gain
};

enum class HermiteMode {
    shared,       // one (alpha1, alpha3) pair; Hermite basis at each antenna's own sigma
    per_antenna,  // refit (alpha1, alpha3) per antenna at its own sigma
};

enum class Equalizer {
    zero_forcing,   // divide by the realized desired gain alpha1 sum_m h_k w_k
    deterministic,  // divide by alpha1 M sqrt(L)
};

struct McOptions {
    DistortionPath path = DistortionPath::third_order;
    HermiteMode hermite = HermiteMode::shared;
    Equalizer equalizer = Equalizer::zero_forcing;
    int threads = 0;  // 0: one per hardware thread
    std::size_t fit_samples = 1'000'000;
    std::size_t per_antenna_fit_samples = 10'000;
};

/// PA and its linearization at the nominal operating point.
struct LinkModels {
    PaModel pa;
    HermiteModel hermite;         // fitted at sigma_ref
    double reference_power = 1.0;  // sigma_ref^2 = mean per-antenna PA input power
};

/// Fits the Hermite model of `pa` at the back-off operating point of cfg.
[[nodiscard]] LinkModels fit_link_models(const LinkConfig& cfg, const PaModel& pa, const McOptions& options);
[[nodiscard]] LinkModels fit_link_models(const LinkConfig& cfg, const McOptions& options = {});

/// Common amplitude gain taking modulate() output to the back-off operating
/// point: its expected per-antenna power is Ns, so the gain is sqrt(sigma_ref^2 / Ns).
[[nodiscard]] double operating_gain(const LinkConfig& cfg);

/// One independent channel + data realization. Periodograms are |Y_k / g|^2
/// with Y_k the received demodulated coefficient and g = operating_gain(),
/// i.e. in the per-bin units of the closed forms (see analytic.hpp).
struct TrialResult {
    std::vector<double> p_desired;
    std::vector<double> p_distortion;
    std::vector<double> p_total;
    double evm_power = 0.0;  // mean equalized error power over data bins
    cplx alpha1_sum{};       // sum of per-antenna gains actually used
    cplx alpha3_sum{};
    int antennas = 0;
};

[[nodiscard]] TrialResult run_trial(const LinkConfig& cfg, const LinkModels& models, const McOptions& options,
                                    std::uint64_t trial);

struct McEstimate {
    SpectralDensity psd_total;
    SpectralDensity psd_desired;
    SpectralDensity psd_distortion;
    std::array<SpectralDensity, 2> psd_distortion_half;  // even / odd trials
    double evm_power = 0.0;
    std::array<double, 2> evm_power_half{};
    int trials_used = 0;
    double normalization = 1.0;  // multiply PSDs by this for unit total received power
    double cross_residual = 0.0;  // |sum(total - desired - distortion)| / sum(total)
    cplx alpha1_mean{};           // mean per-antenna gains over all trials
    cplx alpha3_mean{};

    /// Split-half standard error of a statistic, from its values on the two halves.
    [[nodiscard]] static double split_half_stderr(double half0, double half1) { return 0.5 * std::abs(half0 - half1); }
};

/// Averages cfg.trials independent trials. Output is identical for any thread count.
[[nodiscard]] McEstimate estimate(const LinkConfig& cfg, const LinkModels& models, const McOptions& options);

enum class SweepAxis { L, tau_max, M };

[[nodiscard]] std::string to_string(SweepAxis axis);
[[nodiscard]] SweepAxis parse_sweep_axis(const std::string& s);
[[nodiscard]] LinkConfig with_axis_value(LinkConfig cfg, SweepAxis axis, int value);

struct SweepPoint {
    int value = 0;
    LinkConfig cfg;
    LinkModels models;
    AnalyticModel analytic;
    McEstimate mc;
    SpectralDensity dist_analytic;
    SpectralDensity dist_isotropic;
    EvmSpectrum evm_analytic;
    EvmSpectrum evm_isotropic;
    double runtime_s = 0.0;

    [[nodiscard]] double evm_mc_db() const;
    [[nodiscard]] double evm_stderr_db() const;
    /// 1 / total analytic received power (desired on data bins plus distortion).
    [[nodiscard]] double analytic_normalization() const;
};

struct EvmRow {
    int sweep_value = 0;
    double evm_mc_db = 0.0;
    double evm_analytic_db = 0.0;
    double evm_iso_db = 0.0;
    double stderr_db = 0.0;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::L;
    std::vector<SweepPoint> points;

    [[nodiscard]] std::vector<EvmRow> evm_report() const;
};

/// One Monte Carlo estimate plus closed forms per value. Every point reuses
/// cfg_base.seed so the sweep runs on common random numbers.
[[nodiscard]] SweepResult sweep(const LinkConfig& cfg_base, SweepAxis axis, const std::vector<int>& values,
                                const McOptions& options, bool run_mc = true);

/// psd.csv: sweep_value,k_centered,freq_norm,desired_db,dist_mc_db,dist_analytic_db,dist_iso_db
/// MC columns use the MC normalization, analytic columns the analytic one.
/// freq_norm = k / N.
void write_psd_csv(std::ostream& os, const SweepResult& result);
/// evm.csv: sweep_value,evm_mc_db,evm_analytic_db,evm_iso_db,stderr_db
void write_evm_csv(std::ostream& os, const SweepResult& result);

}  // namespace nlmimo
