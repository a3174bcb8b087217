#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace rfi {

using cplx = std::complex<double>;

size_t next_pow2(size_t n);

// In-place radix-2 complex FFT; size must be a power of two.
// inverse=true applies the 1/N scaling.
void fft_inplace(std::vector<cplx>& x, bool inverse);

// Full linear convolution, output length la + lb - 1.
std::vector<double> convolve_direct(const std::vector<double>& a,
                                    const std::vector<double>& b);
std::vector<cplx> convolve_direct(const std::vector<cplx>& a,
                                  const std::vector<double>& b);

std::vector<double> convolve_fft(const std::vector<double>& a,
                                 const std::vector<double>& b);
std::vector<cplx> convolve_fft(const std::vector<cplx>& a,
                               const std::vector<double>& b);

// Picks direct for small sizes, FFT otherwise.
std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b);
std::vector<cplx> convolve(const std::vector<cplx>& a,
                           const std::vector<double>& b);

}  // namespace rfi
