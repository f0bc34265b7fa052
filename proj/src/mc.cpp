#include "nlmimo/mc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "nlmimo/dft.hpp"
#include "nlmimo/waveform.hpp"

namespace nlmimo {
namespace {

constexpr std::uint64_t kGlobalTrial = 1ull << 40;
constexpr int kBlockTrials = 8;

struct Accumulator {
    std::vector<double> desired, distortion, total;
    std::array<std::vector<double>, 2> distortion_half;
    std::array<double, 2> evm_half{};
    std::array<int, 2> count_half{};
    cplx alpha1_sum{}, alpha3_sum{};
    long long antennas = 0;

    explicit Accumulator(int N)
        : desired(N), distortion(N), total(N), distortion_half{std::vector<double>(N), std::vector<double>(N)} {}

    void add(const TrialResult& t, std::uint64_t trial) {
        const int h = static_cast<int>(trial % 2);
        for (std::size_t b = 0; b < desired.size(); ++b) {
            desired[b] += t.p_desired[b];
            distortion[b] += t.p_distortion[b];
            total[b] += t.p_total[b];
            distortion_half[h][b] += t.p_distortion[b];
        }
        evm_half[h] += t.evm_power;
        ++count_half[h];
        alpha1_sum += t.alpha1_sum;
        alpha3_sum += t.alpha3_sum;
        antennas += t.antennas;
    }

    void merge(const Accumulator& o) {
        for (std::size_t b = 0; b < desired.size(); ++b) {
            desired[b] += o.desired[b];
            distortion[b] += o.distortion[b];
            total[b] += o.total[b];
            for (int h = 0; h < 2; ++h) distortion_half[h][b] += o.distortion_half[h][b];
        }
        for (int h = 0; h < 2; ++h) {
            evm_half[h] += o.evm_half[h];
            count_half[h] += o.count_half[h];
        }
        alpha1_sum += o.alpha1_sum;
        alpha3_sum += o.alpha3_sum;
        antennas += o.antennas;
    }
};

std::vector<double> scaled(const std::vector<double>& v, double s) {
    std::vector<double> out(v);
    for (auto& x : out) x *= s;
    return out;
}

double safe_db(double v) {
    return v > 0.0 ? to_db(v) : -std::numeric_limits<double>::infinity();
}

}  // namespace

LinkModels fit_link_models(const LinkConfig& cfg, const PaModel& pa, const McOptions& options) {
    require_valid(cfg);
    LinkModels m{pa, {}, backoff_power(cfg.pa, cfg.ibo_db)};
    Rng rng = seeded_rng(cfg.seed, stream_id(kGlobalTrial, StreamPurpose::pa_fit));
    m.hermite = fit_hermite(as_nonlinearity(pa), std::sqrt(m.reference_power), options.fit_samples, rng).model;
    return m;
}

LinkModels fit_link_models(const LinkConfig& cfg, const McOptions& options) {
    return fit_link_models(cfg, RappPa{cfg.pa}, options);
}

double operating_gain(const LinkConfig& cfg) {
    return std::sqrt(backoff_power(cfg.pa, cfg.ibo_db) / cfg.Ns);
}

TrialResult run_trial(const LinkConfig& cfg, const LinkModels& models, const McOptions& options,
                      std::uint64_t trial) {
    require_valid(cfg);
    const int N = cfg.N();
    const int M = cfg.M;

    Rng ch_rng = seeded_rng(cfg.seed, stream_id(trial, StreamPurpose::channel));
    Rng data_rng = seeded_rng(cfg.seed, stream_id(trial, StreamPurpose::data));
    Rng fit_rng = seeded_rng(cfg.seed, stream_id(trial, StreamPurpose::pa_fit));

    const ChannelRealization ch = draw_channel(cfg, ch_rng);
    const CMatrix w = mrt_precoder(ch);
    const CVector data = draw_qam(cfg, data_rng);
    CMatrix x = modulate(data, w, cfg);

    const double g = operating_gain(cfg);
    for (auto& v : x.flat()) v *= g;

    const Nonlinearity psi = as_nonlinearity(models.pa);
    const Dft fft(N);
    const double inv_n = 1.0 / N;
    CVector yu(N), yd(N), gain(N);
    CVector ub(N), db(N);

    TrialResult out;
    out.antennas = M;
    for (int m = 0; m < M; ++m) {
        const auto xm = x.row(m);
        double pw = 0.0;
        for (const auto& v : xm) pw += std::norm(v);
        const double sigma_m = pw > 0.0 ? std::sqrt(pw / N) : std::sqrt(models.reference_power);

        HermiteModel model = models.hermite.with_sigma(sigma_m);
        if (options.hermite == HermiteMode::per_antenna)
            model = fit_hermite(psi, sigma_m, options.per_antenna_fit_samples, fit_rng).model;

        if (options.path == DistortionPath::third_order) {
            auto dec = decompose(xm, model);
            std::copy(dec.u.begin(), dec.u.end(), ub.begin());
            std::copy(dec.d.begin(), dec.d.end(), db.begin());
        } else {
            // In-sample Bussgang gain: makes d orthogonal to this antenna's x.
            cplx proj{};
            for (int n = 0; n < N; ++n) {
                db[n] = psi(xm[n]);
                proj += db[n] * std::conj(xm[n]);
            }
            if (pw > 0.0) model.alpha1 = proj / pw;
            for (int n = 0; n < N; ++n) {
                ub[n] = model.alpha1 * xm[n];
                db[n] -= ub[n];
            }
        }
        out.alpha1_sum += model.alpha1;
        out.alpha3_sum += model.alpha3;
        fft.forward(ub, ub);
        fft.forward(db, db);

        // Circular propagation is a per-bin product with h_k in this domain.
        const auto hm = ch.freq().row(m);
        const auto wm = w.row(m);
        for (int b = 0; b < N; ++b) {
            yu[b] += hm[b] * ub[b] * inv_n;
            yd[b] += hm[b] * db[b] * inv_n;
            gain[b] += model.alpha1 * g * hm[b] * wm[b];
        }
    }

    out.p_desired.resize(N);
    out.p_distortion.resize(N);
    out.p_total.resize(N);
    const double inv_g2 = 1.0 / (g * g);
    for (int b = 0; b < N; ++b) {
        out.p_desired[b] = std::norm(yu[b]) * inv_g2;
        out.p_distortion[b] = std::norm(yd[b]) * inv_g2;
        out.p_total[b] = std::norm(yu[b] + yd[b]) * inv_g2;
    }

    const cplx det_gain = models.hermite.alpha1 * g * static_cast<double>(M) * std::sqrt(static_cast<double>(cfg.L));
    double err = 0.0;
    for (int i = 0; i < cfg.Ns; ++i) {
        const int b = from_centered(data_subcarrier(i, cfg.Ns), N);
        const cplx G = options.equalizer == Equalizer::zero_forcing ? gain[b] : det_gain;
        err += std::norm((yu[b] + yd[b]) / G - data[i]);
    }
    out.evm_power = err / cfg.Ns;
    return out;
}

McEstimate estimate(const LinkConfig& cfg, const LinkModels& models, const McOptions& options) {
    require_valid(cfg);
    const int N = cfg.N();
    const int trials = cfg.trials;
    const int blocks = (trials + kBlockTrials - 1) / kBlockTrials;

    std::vector<Accumulator> partial(blocks, Accumulator(N));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (int blk = next++; blk < blocks; blk = next++) {
            try {
                const int first = blk * kBlockTrials;
                const int last = std::min(trials, first + kBlockTrials);
                for (int t = first; t < last; ++t)
                    partial[blk].add(run_trial(cfg, models, options, static_cast<std::uint64_t>(t)), t);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, blocks);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    Accumulator acc(N);
    for (const auto& p : partial) acc.merge(p);

    McEstimate est;
    const double inv_t = 1.0 / trials;
    est.trials_used = trials;
    est.psd_desired = SpectralDensity(scaled(acc.desired, inv_t), cfg.Ns);
    est.psd_distortion = SpectralDensity(scaled(acc.distortion, inv_t), cfg.Ns);
    est.psd_total = SpectralDensity(scaled(acc.total, inv_t), cfg.Ns);
    for (int h = 0; h < 2; ++h) {
        const double c = acc.count_half[h];
        est.psd_distortion_half[h] = SpectralDensity(scaled(acc.distortion_half[h], c > 0 ? 1.0 / c : 0.0), cfg.Ns);
        est.evm_power_half[h] = c > 0 ? acc.evm_half[h] / c : 0.0;
    }
    est.evm_power = (acc.evm_half[0] + acc.evm_half[1]) * inv_t;

    const double total = est.psd_total.total();
    est.normalization = total > 0.0 ? 1.0 / total : 1.0;
    double cross = 0.0;
    for (int b = 0; b < N; ++b) cross += est.psd_total[b] - est.psd_desired[b] - est.psd_distortion[b];
    est.cross_residual = total > 0.0 ? std::abs(cross) / total : 0.0;
    if (acc.antennas > 0) {
        est.alpha1_mean = acc.alpha1_sum / static_cast<double>(acc.antennas);
        est.alpha3_mean = acc.alpha3_sum / static_cast<double>(acc.antennas);
    }
    return est;
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::L: return "L";
        case SweepAxis::tau_max: return "tau_max";
        case SweepAxis::M: return "M";
    }
    return "?";
}

SweepAxis parse_sweep_axis(const std::string& s) {
    if (s == "L") return SweepAxis::L;
    if (s == "tau_max") return SweepAxis::tau_max;
    if (s == "M") return SweepAxis::M;
    throw ConfigError("unknown sweep axis '" + s + "' (expected L, tau_max or M)");
}

LinkConfig with_axis_value(LinkConfig cfg, SweepAxis axis, int value) {
    switch (axis) {
        case SweepAxis::L: cfg.L = value; break;
        case SweepAxis::tau_max: cfg.tau_max = value; break;
        case SweepAxis::M: cfg.M = value; break;
    }
    return cfg;
}

double SweepPoint::evm_mc_db() const { return to_db(mc.evm_power); }

double SweepPoint::evm_stderr_db() const {
    // delta method on 10 log10(.)
    const double se = McEstimate::split_half_stderr(mc.evm_power_half[0], mc.evm_power_half[1]);
    return mc.evm_power > 0.0 ? 10.0 / std::log(10.0) * se / mc.evm_power : 0.0;
}

double SweepPoint::analytic_normalization() const {
    const double desired = desired_power(cfg.M, cfg.L, analytic.alpha1) * cfg.Ns;
    return 1.0 / (desired + dist_analytic.total());
}

std::vector<EvmRow> SweepResult::evm_report() const {
    std::vector<EvmRow> rows;
    for (const auto& p : points)
        rows.push_back({p.value, p.mc.trials_used > 0 ? p.evm_mc_db() : std::numeric_limits<double>::quiet_NaN(),
                        to_db(p.evm_analytic.power), to_db(p.evm_isotropic.power),
                        p.mc.trials_used > 0 ? p.evm_stderr_db() : std::numeric_limits<double>::quiet_NaN()});
    return rows;
}

SweepResult sweep(const LinkConfig& cfg_base, SweepAxis axis, const std::vector<int>& values,
                  const McOptions& options, bool run_mc) {
    if (values.empty()) throw ConfigError("sweep: no values");
    SweepResult res;
    res.axis = axis;
    for (int v : values) {
        const auto t0 = std::chrono::steady_clock::now();
        SweepPoint pt;
        pt.value = v;
        pt.cfg = with_axis_value(cfg_base, axis, v);
        require_valid(pt.cfg);
        pt.models = fit_link_models(pt.cfg, options);
        if (run_mc) pt.mc = estimate(pt.cfg, pt.models, options);

        HermiteModel h = pt.models.hermite;
        if (run_mc && options.hermite == HermiteMode::per_antenna) {
            h.alpha1 = pt.mc.alpha1_mean;
            h.alpha3 = pt.mc.alpha3_mean;
        }
        pt.analytic = analytic_model(h, pt.models.reference_power);
        pt.dist_analytic = distortion_psd_avg(pt.cfg, pt.analytic);
        pt.dist_isotropic = isotropic_baseline(pt.cfg, pt.analytic);
        pt.evm_analytic = evm_theoretical(pt.cfg, pt.analytic);
        pt.evm_isotropic = evm_isotropic(pt.cfg, pt.analytic);
        pt.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.points.push_back(std::move(pt));
    }
    return res;
}

void write_psd_csv(std::ostream& os, const SweepResult& result) {
    os << "sweep_value,k_centered,freq_norm,desired_db,dist_mc_db,dist_analytic_db,dist_iso_db\n";
    os << std::setprecision(10);
    for (const auto& p : result.points) {
        const int N = p.cfg.N();
        const bool have_mc = p.mc.trials_used > 0;
        const double an_norm = p.analytic_normalization();
        const double desired_an = desired_power(p.cfg.M, p.cfg.L, p.analytic.alpha1);
        for (int k = -N / 2 + 1; k <= N / 2; ++k) {
            const double desired = have_mc ? p.mc.psd_desired.at(k) * p.mc.normalization
                                           : (is_in_band(k, p.cfg.Ns) ? desired_an * an_norm : 0.0);
            os << p.value << ',' << k << ',' << static_cast<double>(k) / N << ',' << safe_db(desired) << ','
               << (have_mc ? safe_db(p.mc.psd_distortion.at(k) * p.mc.normalization)
                           : std::numeric_limits<double>::quiet_NaN())
               << ',' << safe_db(p.dist_analytic.at(k) * an_norm) << ','
               << safe_db(p.dist_isotropic.at(k) * an_norm) << '\n';
        }
    }
}

void write_evm_csv(std::ostream& os, const SweepResult& result) {
    os << "sweep_value,evm_mc_db,evm_analytic_db,evm_iso_db,stderr_db\n";
    os << std::setprecision(10);
    for (const auto& r : result.evm_report())
        os << r.sweep_value << ',' << r.evm_mc_db << ',' << r.evm_analytic_db << ',' << r.evm_iso_db << ','
           << r.stderr_db << '\n';
}

}  // namespace nlmimo
