#include "nlmimo/dft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include "nlmimo/config.hpp"

namespace nlmimo {
namespace {

// FFTW planning is not thread-safe; execution through fftw_execute_dft is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

std::pair<fftw_plan, fftw_plan> plans_for(int n) {
    static std::map<int, std::pair<fftw_plan, fftw_plan>> cache;
    std::lock_guard lock(plan_mutex());
    if (auto it = cache.find(n); it != cache.end()) return it->second;

    auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan f = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags);
    fftw_plan b = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags);
    fftw_free(buf);
    if (f == nullptr || b == nullptr) throw std::runtime_error("FFTW planning failed");
    return cache.emplace(n, std::make_pair(f, b)).first->second;
}

void check_len(std::size_t got, int n, const char* what) {
    if (got != static_cast<std::size_t>(n))
        throw ConfigError(std::string(what) + ": length " + std::to_string(got) + " does not match N = " +
                          std::to_string(n));
}

fftw_complex* as_fftw(const cplx* p) {
    return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(p));
}

}  // namespace

Dft::Dft(int n) : n_(n) {
    if (n < 1) throw ConfigError("Dft: length must be positive");
    auto [f, b] = plans_for(n);
    fwd_ = f;
    inv_ = b;
}

void Dft::forward(std::span<const cplx> in, std::span<cplx> out) const {
    check_len(in.size(), n_, "dft input");
    check_len(out.size(), n_, "dft output");
    // Plans are in-place, so new-array execution must be in-place too.
    if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
    fftw_execute_dft(static_cast<fftw_plan>(fwd_), as_fftw(out.data()), as_fftw(out.data()));
}

void Dft::inverse(std::span<const cplx> in, std::span<cplx> out) const {
    check_len(in.size(), n_, "idft input");
    check_len(out.size(), n_, "idft output");
    if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
    fftw_execute_dft(static_cast<fftw_plan>(inv_), as_fftw(out.data()), as_fftw(out.data()));
    const double s = 1.0 / n_;
    for (auto& v : out) v *= s;
}

CVector dft(std::span<const cplx> x) { return dft(x, static_cast<int>(x.size())); }
CVector idft(std::span<const cplx> X) { return idft(X, static_cast<int>(X.size())); }

CVector dft(std::span<const cplx> x, int n) {
    check_len(x.size(), n, "dft input");
    CVector out(x.size());
    Dft(n).forward(x, out);
    return out;
}

CVector idft(std::span<const cplx> X, int n) {
    check_len(X.size(), n, "idft input");
    CVector out(X.size());
    Dft(n).inverse(X, out);
    return out;
}

}  // namespace nlmimo
