#include "nlmimo/spectral.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "nlmimo/config.hpp"

namespace nlmimo {

int to_centered(int bin, int N) {
    if (N < 1 || bin < 0 || bin >= N) throw ConfigError("to_centered: bin outside [0, N)");
    return bin > N / 2 ? bin - N : bin;
}

int from_centered(int k, int N) {
    if (N < 1) throw ConfigError("from_centered: N must be positive");
    const int r = k % N;
    return r < 0 ? r + N : r;
}

bool is_in_band(int k_centered, int Ns) noexcept {
    return k_centered > -Ns / 2 && k_centered <= Ns / 2;
}

SpectralDensity::SpectralDensity(int N, int Ns) : bins_(static_cast<std::size_t>(N), 0.0), Ns_(Ns) {
    if (N < 1 || Ns < 1 || Ns > N) throw ConfigError("SpectralDensity: need 1 <= Ns <= N");
}

SpectralDensity::SpectralDensity(std::vector<double> bins, int Ns) : bins_(std::move(bins)), Ns_(Ns) {
    if (Ns < 1 || Ns > static_cast<int>(bins_.size()))
        throw ConfigError("SpectralDensity: need 1 <= Ns <= N");
}

double SpectralDensity::at(int k_centered) const { return bins_[from_centered(k_centered, N())]; }
double& SpectralDensity::at(int k_centered) { return bins_[from_centered(k_centered, N())]; }

double SpectralDensity::total() const noexcept { return std::accumulate(bins_.begin(), bins_.end(), 0.0); }

double SpectralDensity::in_band_mean() const {
    double s = 0.0;
    const auto idx = in_band_bins();
    for (int b : idx) s += bins_[b];
    return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
}

double SpectralDensity::out_of_band_mean() const {
    double s = 0.0;
    const auto idx = out_of_band_bins();
    for (int b : idx) s += bins_[b];
    return idx.empty() ? std::numeric_limits<double>::quiet_NaN() : s / static_cast<double>(idx.size());
}

std::vector<int> SpectralDensity::in_band_bins() const {
    std::vector<int> out;
    for (int b = 0; b < N(); ++b)
        if (is_in_band(to_centered(b, N()), Ns_)) out.push_back(b);
    return out;
}

std::vector<int> SpectralDensity::out_of_band_bins() const {
    std::vector<int> out;
    for (int b = 0; b < N(); ++b)
        if (!is_in_band(to_centered(b, N()), Ns_)) out.push_back(b);
    return out;
}

SpectralDensity& SpectralDensity::operator*=(double s) noexcept {
    for (auto& v : bins_) v *= s;
    return *this;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace nlmimo
