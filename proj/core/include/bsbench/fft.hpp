#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace bsb {

// In-place complex FFT. Radix-2 for power-of-two sizes, Bluestein otherwise.
// inverse=true applies the unnormalized conjugate transform divided by n,
// so fft(fft(x), inverse) == x.
void fft(std::vector<std::complex<double>>& a, bool inverse = false);

// Forward DFT of a real signal; returns all n bins.
std::vector<std::complex<double>> fft_real(const std::vector<double>& x);

// One-sided forward DFT of a real signal: bins 0..n/2. Uses the packed
// half-size transform when n is an even power of two.
std::vector<std::complex<double>> rfft_onesided(const double* x,
                                                std::size_t n);

// Linear (non-circular) autocorrelation r[0..max_lag] via zero-padded FFT.
std::vector<double> autocorrelation(const double* x, std::size_t n,
                                    std::size_t max_lag);

}  // namespace bsb
