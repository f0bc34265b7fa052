#pragma once

#include <cstddef>
#include <vector>

namespace nlmimo {

// Arrays over the N oversampled bins are stored DC-first with wraparound:
// storage index b holds centered frequency k = b for b <= N/2 and k = b - N
// otherwise, so k ranges over {-N/2+1, ..., N/2}.

/// Storage index -> centered frequency.
[[nodiscard]] int to_centered(int bin, int N);
/// Centered frequency (any integer, taken mod N) -> storage index in [0, N).
[[nodiscard]] int from_centered(int k, int N);

/// Data subcarriers are k = -Ns/2+1, ..., Ns/2; everything else is out of band.
[[nodiscard]] bool is_in_band(int k_centered, int Ns) noexcept;

/// Per-bin nonnegative power over the oversampled grid.
class SpectralDensity {
public:
    SpectralDensity() = default;
    SpectralDensity(int N, int Ns);
    SpectralDensity(std::vector<double> bins, int Ns);

    [[nodiscard]] int N() const noexcept { return static_cast<int>(bins_.size()); }
    [[nodiscard]] int Ns() const noexcept { return Ns_; }

    double& operator[](std::size_t bin) noexcept { return bins_[bin]; }
    double operator[](std::size_t bin) const noexcept { return bins_[bin]; }

    /// Value at centered frequency k.
    [[nodiscard]] double at(int k_centered) const;
    double& at(int k_centered);

    [[nodiscard]] const std::vector<double>& bins() const noexcept { return bins_; }
    [[nodiscard]] std::vector<double>& bins() noexcept { return bins_; }

    [[nodiscard]] double total() const noexcept;
    [[nodiscard]] double in_band_mean() const;
    [[nodiscard]] double out_of_band_mean() const;

    /// Storage indices of the in-band / out-of-band bins; the two lists
    /// partition {0, ..., N-1}.
    [[nodiscard]] std::vector<int> in_band_bins() const;
    [[nodiscard]] std::vector<int> out_of_band_bins() const;

    SpectralDensity& operator*=(double s) noexcept;

private:
    std::vector<double> bins_;
    int Ns_ = 0;
};

[[nodiscard]] double to_db(double linear);

}  // namespace nlmimo
