#pragma once

#include <span>

#include "nlmimo/cmatrix.hpp"

namespace nlmimo {

// Transform convention used everywhere in the library:
//   forward  X[k] = sum_n x[n] exp(-j 2 pi k n / N)        (unnormalized)
//   inverse  x[n] = (1/N) sum_k X[k] exp(+j 2 pi k n / N)
// so inverse(forward(x)) == x and ||x||^2 == ||X||^2 / N.

/// Fixed-length transform. Cheap to construct; plans are shared per length
/// and execution is reentrant, so one instance per worker is the usual setup.
class Dft {
public:
    explicit Dft(int n);

    [[nodiscard]] int size() const noexcept { return n_; }

    /// in and out may alias. Throws ConfigError on a length mismatch.
    void forward(std::span<const cplx> in, std::span<cplx> out) const;
    void inverse(std::span<const cplx> in, std::span<cplx> out) const;

private:
    int n_;
    void* fwd_;
    void* inv_;
};

[[nodiscard]] CVector dft(std::span<const cplx> x);
[[nodiscard]] CVector idft(std::span<const cplx> X);

/// Length-checked variants: throw ConfigError unless x.size() == n.
[[nodiscard]] CVector dft(std::span<const cplx> x, int n);
[[nodiscard]] CVector idft(std::span<const cplx> X, int n);

}  // namespace nlmimo
