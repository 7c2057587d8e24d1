#pragma once

#include <complex>
#include <vector>

#include "trident/kernels/conv.hpp"

namespace trident::reference {

// Serial, textbook formulations of the hot kernels. These stay deliberately
// independent of the OpenMP implementations: tests compare the two routes and
// the kernel benchmark reports the speedup.

// C (M x N) = A (M x K) * B (K x N), row-major, plain triple loop.
void matmul(int M, int N, int K, const float* A, const float* B, float* C);

// Direct 3D convolution over one (C, T, H, W) volume.
void conv3d_naive(const kernels::Conv3dGeom& g, const float* x, const float* w,
                  const float* bias, float* y);

// O(n^2) discrete Fourier transform.
std::vector<std::complex<double>> dft_naive(
    const std::vector<std::complex<double>>& x);

// Bilinear resize with the same half-pixel convention as the fast path but
// written as an explicit four-tap gather.
void resize_bilinear_naive(const float* src, int in_h, int in_w, float* dst,
                           int out_h, int out_w);

}  // namespace trident::reference
