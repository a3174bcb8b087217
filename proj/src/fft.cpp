#include "rfi/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace rfi {

size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_inplace(std::vector<cplx>& x, bool inverse) {
    const size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_inplace: size must be a power of two");

    // bit reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                cplx u = x[i + k];
                cplx v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= inv;
    }
}

std::vector<double> convolve_direct(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

std::vector<cplx> convolve_direct(const std::vector<cplx>& a,
                                  const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<cplx> out(a.size() + b.size() - 1, cplx(0.0, 0.0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

std::vector<cplx> convolve_fft(const std::vector<cplx>& a,
                               const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    const size_t lout = a.size() + b.size() - 1;
    const size_t n = next_pow2(lout);
    std::vector<cplx> fa(n, cplx(0, 0)), fb(n, cplx(0, 0));
    for (size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
    for (size_t i = 0; i < b.size(); ++i) fb[i] = cplx(b[i], 0.0);
    fft_inplace(fa, false);
    fft_inplace(fb, false);
    for (size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    fft_inplace(fa, true);
    fa.resize(lout);
    return fa;
}

std::vector<double> convolve_fft(const std::vector<double>& a,
                                 const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<cplx> ac(a.size());
    for (size_t i = 0; i < a.size(); ++i) ac[i] = cplx(a[i], 0.0);
    auto c = convolve_fft(ac, b);
    std::vector<double> out(c.size());
    for (size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

namespace {
constexpr size_t kDirectThreshold = 1u << 18;  // a.size()*b.size() below this -> direct
}

std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b) {
    if (a.size() * b.size() <= kDirectThreshold) return convolve_direct(a, b);
    return convolve_fft(a, b);
}

std::vector<cplx> convolve(const std::vector<cplx>& a,
                           const std::vector<double>& b) {
    if (a.size() * b.size() <= kDirectThreshold) return convolve_direct(a, b);
    return convolve_fft(a, b);
}

}  // namespace rfi
