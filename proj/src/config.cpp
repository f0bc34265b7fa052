#include "nlmimo/config.hpp"

#include <cmath>
#include <sstream>

namespace nlmimo {

bool is_supported_qam_order(int order) noexcept {
    return order == 4 || order == 16 || order == 64 || order == 256;
}

std::vector<Diagnostic> LinkConfig::validate() const {
    std::vector<Diagnostic> out;
    auto add = [&out](std::string field, std::string msg) {
        out.push_back({std::move(field), std::move(msg)});
    };

    if (M < 1) add("M", "M must be a positive antenna count");
    if (Ns < 2) add("Ns", "Ns must be at least 2");
    if (Ns % 2 != 0) add("Ns", "Ns must be even");
    if (mu < 1) add("mu", "mu must be a positive oversampling factor");
    if (L < 1) add("L", "L must be a positive number of taps");
    if (tau_max < 1) add("tau_max", "tau_max must be >= 1 (delays lie in [0, tau_max))");
    if (!is_supported_qam_order(qam_order))
        add("qam_order", "qam_order must be one of 4, 16, 64, 256");
    if (!(pa.nu > 0.0) || !std::isfinite(pa.nu)) add("pa.nu", "pa.nu must be positive");
    if (!(pa.r_o > 0.0) || !std::isfinite(pa.r_o)) add("pa.r_o", "pa.r_o must be positive");
    if (!(pa.p > 0.0) || !std::isfinite(pa.p)) add("pa.p", "pa.p must be positive");
    if (!std::isfinite(ibo_db)) add("ibo_db", "ibo_db must be finite");
    if (trials < 1) add("trials", "trials must be >= 1");
    if (mu >= 1 && Ns >= 2 && tau_max > mu * Ns)
        add("tau_max", "tau_max must not exceed the symbol length N = mu * Ns");
    return out;
}

void require_valid(const LinkConfig& cfg) {
    const auto diags = cfg.validate();
    if (diags.empty()) return;
    std::ostringstream os;
    os << "invalid link configuration:";
    for (const auto& d : diags) os << "\n  " << d.field << ": " << d.message;
    throw ConfigError(os.str());
}

}  // namespace nlmimo
