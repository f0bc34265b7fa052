#include "nlmimo/pa.hpp"

#include <cmath>
#include <stdexcept>

namespace nlmimo {

double rapp_amplitude(double r, const PaParams& params) {
    const double t = params.nu * r / params.r_o;
    const double q = 2.0 * params.p;
    if (t <= 1.0) return params.nu * r * std::pow(1.0 + std::pow(t, q), -1.0 / q);
    // Same expression rearranged so large inputs do not overflow.
    return params.r_o * std::pow(1.0 + std::pow(t, -q), -1.0 / q);
}

cplx apply_rapp(cplx x, const PaParams& params) {
    const double r = std::abs(x);
    if (r == 0.0) return {};
    return x * (rapp_amplitude(r, params) / r);
}

CVector apply_rapp(std::span<const cplx> x, const PaParams& params) {
    CVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = apply_rapp(x[i], params);
    return out;
}

cplx PolynomialPa::operator()(cplx x) const {
    const double p = std::norm(x);
    cplx acc{};
    double w = 1.0;
    for (const auto& c : coeffs) {
        acc += c * w;
        w *= p;
    }
    return acc * x;
}

Nonlinearity as_nonlinearity(const PaModel& pa) {
    return std::visit([](const auto& m) -> Nonlinearity { return m; }, pa);
}

HermiteFit fit_hermite(const Nonlinearity& psi, double sigma_x, std::size_t n_samples, Rng& rng) {
    if (!(sigma_x > 0.0) || !std::isfinite(sigma_x)) throw ConfigError("fit_hermite: sigma_x must be positive");
    if (n_samples < 10000) throw ConfigError("fit_hermite: need at least 1e4 samples");

    const double s2 = sigma_x * sigma_x;
    const double s3 = s2 * sigma_x;
    const auto n = static_cast<double>(n_samples);

    CVector xs(n_samples), ys(n_samples), bs(n_samples);
    cplx sum_yx{}, sum_yb{};
    double sum_bb = 0.0, sum_yy = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const cplx x = sigma_x * rng.complex_gaussian();
        const cplx y = psi(x);
        if (!std::isfinite(y.real()) || !std::isfinite(y.imag()))
            throw std::domain_error("fit_hermite: nonlinearity returned a non-finite value");
        const cplx b = s3 * hermite_h3(x / sigma_x);
        xs[i] = x;
        ys[i] = y;
        bs[i] = b;
        sum_yx += y * std::conj(x);
        sum_yb += y * std::conj(b);
        sum_bb += std::norm(b);
        sum_yy += std::norm(y);
    }

    HermiteFit fit;
    fit.n_samples = n_samples;
    fit.model.sigma_x = sigma_x;
    fit.model.alpha1 = sum_yx / n / s2;
    fit.model.alpha3 = sum_yb / sum_bb;

    // Linearized standard errors of the two sample projections.
    const cplx mean_yx = sum_yx / n;
    const double mean_bb = sum_bb / n;
    double var1 = 0.0, var3 = 0.0, res = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        var1 += std::norm(ys[i] * std::conj(xs[i]) - mean_yx);
        var3 += std::norm((ys[i] - fit.model.alpha3 * bs[i]) * std::conj(bs[i]));
        res += std::norm(ys[i] - fit.model.alpha1 * xs[i] - fit.model.alpha3 * bs[i]);
    }
    fit.alpha1_stderr = std::sqrt(var1 / (n - 1.0) / n) / s2;
    fit.alpha3_stderr = std::sqrt(var3 / (n - 1.0) / n) / mean_bb;
    fit.residual = sum_yy > 0.0 ? res / sum_yy : 0.0;
    return fit;
}

Decomposition decompose(std::span<const cplx> x, const HermiteModel& model) {
    Decomposition out{CVector(x.size()), CVector(x.size())};
    const double s = model.sigma_x;
    const double s3 = s * s * s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.u[i] = model.alpha1 * x[i];
        out.d[i] = model.alpha3 * s3 * hermite_h3(x[i] / s);
    }
    return out;
}

double backoff_power(const PaParams& params, double ibo_db) {
    if (!std::isfinite(ibo_db)) throw ConfigError("back-off must be finite");
    return params.r_o * params.r_o * std::pow(10.0, -ibo_db / 10.0);
}

BackoffResult apply_backoff(std::span<const cplx> x, const PaParams& params, double ibo_db) {
    const double target = backoff_power(params, ibo_db);
    double p = 0.0;
    for (const auto& v : x) p += std::norm(v);
    if (x.empty() || !(p > 0.0)) throw ConfigError("apply_backoff: input has zero power");
    p /= static_cast<double>(x.size());

    BackoffResult out;
    out.gain = std::sqrt(target / p);
    out.sigma_x = std::sqrt(target);
    out.signal.assign(x.begin(), x.end());
    for (auto& v : out.signal) v *= out.gain;
    return out;
}

void to_json(nlohmann::json& j, const HermiteModel& m) {
    j = nlohmann::json{{"alpha1_re", m.alpha1.real()},
                       {"alpha1_im", m.alpha1.imag()},
                       {"alpha3_re", m.alpha3.real()},
                       {"alpha3_im", m.alpha3.imag()},
                       {"sigma_x", m.sigma_x}};
}

void from_json(const nlohmann::json& j, HermiteModel& m) {
    m.alpha1 = {j.at("alpha1_re").get<double>(), j.at("alpha1_im").get<double>()};
    m.alpha3 = {j.at("alpha3_re").get<double>(), j.at("alpha3_im").get<double>()};
    m.sigma_x = j.at("sigma_x").get<double>();
    if (!(m.sigma_x > 0.0)) throw ConfigError("HermiteModel fixture: sigma_x must be positive");
}

}  // namespace nlmimo
