#include "trident/reference/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace trident::reference {

void matmul(int M, int N, int K, const float* A, const float* B, float* C) {
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < N; ++j) {
            float acc = 0.0f;
            for (int k = 0; k < K; ++k)
                acc += A[static_cast<std::size_t>(i) * K + k] *
                       B[static_cast<std::size_t>(k) * N + j];
            C[static_cast<std::size_t>(i) * N + j] = acc;
        }
    }
}

void conv3d_naive(const kernels::Conv3dGeom& g, const float* x, const float* w,
                  const float* bias, float* y) {
    const int ot = g.out_t(), oh = g.out_h(), ow = g.out_w();
    for (int oc = 0; oc < g.out_c; ++oc) {
        for (int t = 0; t < ot; ++t) {
            for (int h = 0; h < oh; ++h) {
                for (int wcol = 0; wcol < ow; ++wcol) {
                    double acc = bias ? bias[oc] : 0.0;
                    for (int c = 0; c < g.in_c; ++c) {
                        for (int kt = 0; kt < g.kt; ++kt) {
                            const int it = t * g.st - g.pt + kt;
                            if (it < 0 || it >= g.in_t) continue;
                            for (int kh = 0; kh < g.kh; ++kh) {
                                const int ih = h * g.sh - g.ph + kh;
                                if (ih < 0 || ih >= g.in_h) continue;
                                for (int kw = 0; kw < g.kw; ++kw) {
                                    const int iw = wcol * g.sw - g.pw + kw;
                                    if (iw < 0 || iw >= g.in_w) continue;
                                    const std::size_t xi =
                                        ((static_cast<std::size_t>(c) * g.in_t + it) *
                                             g.in_h + ih) * g.in_w + iw;
                                    const std::size_t wi =
                                        (((static_cast<std::size_t>(oc) * g.in_c + c) *
                                              g.kt + kt) * g.kh + kh) * g.kw + kw;
                                    acc += static_cast<double>(x[xi]) * w[wi];
                                }
                            }
                        }
                    }
                    const std::size_t yi =
                        ((static_cast<std::size_t>(oc) * ot + t) * oh + h) * ow + wcol;
                    y[yi] = static_cast<float>(acc);
                }
            }
        }
    }
}

std::vector<std::complex<double>> dft_naive(
    const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    const double two_pi = 2.0 * 3.14159265358979323846;
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double ang = -two_pi * static_cast<double>(k) *
                               static_cast<double>(i) / static_cast<double>(n);
            acc += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

void resize_bilinear_naive(const float* src, int in_h, int in_w, float* dst,
                           int out_h, int out_w) {
    auto sample = [&](int y, int x) {
        y = std::clamp(y, 0, in_h - 1);
        x = std::clamp(x, 0, in_w - 1);
        return static_cast<double>(src[static_cast<std::size_t>(y) * in_w + x]);
    };
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            const double fy = (y + 0.5) * in_h / static_cast<double>(out_h) - 0.5;
            const double fx = (x + 0.5) * in_w / static_cast<double>(out_w) - 0.5;
            const int y0 = static_cast<int>(std::floor(fy));
            const int x0 = static_cast<int>(std::floor(fx));
            const double dy = fy - y0;
            const double dx = fx - x0;
            const double v = sample(y0, x0) * (1 - dy) * (1 - dx) +
                             sample(y0, x0 + 1) * (1 - dy) * dx +
                             sample(y0 + 1, x0) * dy * (1 - dx) +
                             sample(y0 + 1, x0 + 1) * dy * dx;
            dst[static_cast<std::size_t>(y) * out_w + x] = static_cast<float>(v);
        }
    }
}

}  // namespace trident::reference
