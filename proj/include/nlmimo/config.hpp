#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlmimo {

/// Raised for invalid parameters or mismatched array dimensions.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Memoryless Rapp amplifier: small-signal gain, saturation amplitude and
/// smoothness exponent.
struct PaParams {
    double nu = 1.0;
    double r_o = 1.0;
    double p = 2.0;
};

/// One problem found while validating a configuration.
struct Diagnostic {
    std::string field;
    std::string message;
};

/// Full parameter set of a single-user downlink experiment.
///
/// N = mu * Ns is the oversampled symbol length. Channel tap delays live on
/// the oversampled grid in {0, ..., tau_max - 1}.
struct LinkConfig {
    int M = 100;
    int Ns = 1024;
    int mu = 4;
    int L = 20;
    int tau_max = 100;
    int qam_order = 64;
    PaParams pa{};
    double ibo_db = 8.0;
    int trials = 200;
    std::uint64_t seed = 1;

    [[nodiscard]] int N() const noexcept { return mu * Ns; }

    /// Every constraint violation; empty when the configuration is usable.
    [[nodiscard]] std::vector<Diagnostic> validate() const;
};

/// Throws ConfigError carrying all diagnostics when cfg is invalid.
void require_valid(const LinkConfig& cfg);

[[nodiscard]] bool is_supported_qam_order(int order) noexcept;

}  // namespace nlmimo
