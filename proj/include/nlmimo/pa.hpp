#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nlmimo/cmatrix.hpp"
#include "nlmimo/config.hpp"
#include "nlmimo/rng.hpp"

namespace nlmimo {

using Nonlinearity = std::function<cplx(cplx)>;

/// Rapp AM/AM amplitude nu*r * (1 + (nu*r/r_o)^(2p))^(-1/(2p)); saturates at r_o.
[[nodiscard]] double rapp_amplitude(double r, const PaParams& params);
[[nodiscard]] cplx apply_rapp(cplx x, const PaParams& params);
[[nodiscard]] CVector apply_rapp(std::span<const cplx> x, const PaParams& params);

/// Odd memoryless polynomial: psi(x) = sum_i coeffs[i] * x * |x|^(2i).
struct PolynomialPa {
    std::vector<cplx> coeffs;

    [[nodiscard]] cplx operator()(cplx x) const;
    [[nodiscard]] static PolynomialPa identity() { return {{1.0}}; }
    /// x - c x|x|^2
    [[nodiscard]] static PolynomialPa cubic(cplx c) { return {{1.0, -c}}; }
};

struct RappPa {
    PaParams params;
    [[nodiscard]] cplx operator()(cplx x) const { return apply_rapp(x, params); }
};

using PaModel = std::variant<RappPa, PolynomialPa>;

[[nodiscard]] Nonlinearity as_nonlinearity(const PaModel& pa);

/// Third-order complex Hermite basis z|z|^2 - 2z, orthogonal to z under CN(0,1).
[[nodiscard]] constexpr cplx hermite_h3(cplx z) noexcept { return z * std::norm(z) - 2.0 * z; }

/// Linearized PA: psi(x) ~ alpha1 x + alpha3 sigma^3 H3(x / sigma).
/// alpha3 is the coefficient of x|x|^2 at the device's own amplitude scale.
struct HermiteModel {
    cplx alpha1{1.0, 0.0};
    cplx alpha3{0.0, 0.0};
    double sigma_x = 1.0;

    /// Same gains, Hermite basis taken at another input standard deviation.
    [[nodiscard]] HermiteModel with_sigma(double s) const { return {alpha1, alpha3, s}; }
};

struct HermiteFit {
    HermiteModel model;
    double residual = 0.0;  // mean |psi - model|^2 / mean |psi|^2
    double alpha1_stderr = 0.0;
    double alpha3_stderr = 0.0;
    std::size_t n_samples = 0;
};

/// Projects psi onto {x, sigma^3 H3(x/sigma)} using n_samples draws of
/// x ~ CN(0, sigma_x^2):
///   alpha1 = mean(psi(x) x*) / sigma_x^2
///   alpha3 = mean(psi(x) conj(B)) / mean(|B|^2),  B = sigma^3 H3(x/sigma).
/// Throws ConfigError for a non-positive sigma_x or n_samples < 10^4 and
/// std::domain_error if psi returns a non-finite value.
[[nodiscard]] HermiteFit fit_hermite(const Nonlinearity& psi, double sigma_x, std::size_t n_samples, Rng& rng);

struct Decomposition {
    CVector u;  // alpha1 x
    CVector d;  // alpha3 sigma^3 H3(x / sigma)
};

[[nodiscard]] Decomposition decompose(std::span<const cplx> x, const HermiteModel& model);

/// Mean input power r_o^2 * 10^(-ibo_db/10) for a given back-off.
[[nodiscard]] double backoff_power(const PaParams& params, double ibo_db);

struct BackoffResult {
    CVector signal;
    double sigma_x = 0.0;
    double gain = 0.0;
};

/// Scales the whole array by one common factor so that its mean sample power
/// equals backoff_power(). Throws ConfigError for a zero-power input or a
/// non-finite back-off.
[[nodiscard]] BackoffResult apply_backoff(std::span<const cplx> x, const PaParams& params, double ibo_db);

void to_json(nlohmann::json& j, const HermiteModel& m);
void from_json(const nlohmann::json& j, HermiteModel& m);

}  // namespace nlmimo
