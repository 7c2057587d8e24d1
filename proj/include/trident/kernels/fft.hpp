#pragma once

#include <complex>
#include <vector>

namespace trident::kernels {

// In-place iterative radix-2 FFT; n must be a power of two. The double
// variant backs the feature extractors so spectra stay well inside the
// stated oracle tolerances.
void fft_inplace(std::complex<float>* x, int n, bool inverse = false);
void fft_inplace(std::complex<double>* x, int n, bool inverse = false);

inline void fft_inplace(std::vector<std::complex<float>>& x, bool inverse = false) {
    fft_inplace(x.data(), static_cast<int>(x.size()), inverse);
}
inline void fft_inplace(std::vector<std::complex<double>>& x, bool inverse = false) {
    fft_inplace(x.data(), static_cast<int>(x.size()), inverse);
}

// Periodic window functions of length n.
std::vector<float> hann_window(int n);
std::vector<float> hamming_window(int n);

}  // namespace trident::kernels
