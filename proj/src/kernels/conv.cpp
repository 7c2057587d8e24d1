#include "trident/kernels/conv.hpp"

#include <cstring>

#include "trident/kernels/gemm.hpp"

namespace trident::kernels {

void im2col_3d(const Conv3dGeom& g, const float* x, float* cols) {
    const int ot = g.out_t(), oh = g.out_h(), ow = g.out_w();
    const std::size_t spatial = static_cast<std::size_t>(ot) * oh * ow;
    const int rows = static_cast<int>(g.cols_rows());
#pragma omp parallel for schedule(static)
    for (int row = 0; row < rows; ++row) {
        int r = row;
        const int kw = r % g.kw;
        r /= g.kw;
        const int kh = r % g.kh;
        r /= g.kh;
        const int kt = r % g.kt;
        const int c = r / g.kt;
        const float* plane =
            x + static_cast<std::size_t>(c) * g.in_t * g.in_h * g.in_w;
        float* dst = cols + static_cast<std::size_t>(row) * spatial;
        for (int t = 0; t < ot; ++t) {
            const int it = t * g.st - g.pt + kt;
            const bool t_ok = it >= 0 && it < g.in_t;
            for (int h = 0; h < oh; ++h) {
                const int ih = h * g.sh - g.ph + kh;
                if (!t_ok || ih < 0 || ih >= g.in_h) {
                    std::memset(dst, 0, sizeof(float) * ow);
                    dst += ow;
                    continue;
                }
                const float* src = plane +
                                   (static_cast<std::size_t>(it) * g.in_h + ih) * g.in_w;
                const int iw0 = -g.pw + kw;
                for (int w = 0; w < ow; ++w) {
                    const int iw = iw0 + w * g.sw;
                    dst[w] = (iw >= 0 && iw < g.in_w) ? src[iw] : 0.0f;
                }
                dst += ow;
            }
        }
    }
}

void col2im_3d(const Conv3dGeom& g, const float* cols, float* dx) {
    const int ot = g.out_t(), oh = g.out_h(), ow = g.out_w();
    const std::size_t spatial = static_cast<std::size_t>(ot) * oh * ow;
    std::memset(dx, 0, sizeof(float) * g.in_size());
    const int kvol = g.kt * g.kh * g.kw;
    // Rows of `cols` are grouped by input channel, so parallelising over
    // channels keeps the overlapping adds thread-private.
#pragma omp parallel for schedule(static)
    for (int c = 0; c < g.in_c; ++c) {
        float* plane = dx + static_cast<std::size_t>(c) * g.in_t * g.in_h * g.in_w;
        for (int kidx = 0; kidx < kvol; ++kidx) {
            int r = kidx;
            const int kw = r % g.kw;
            r /= g.kw;
            const int kh = r % g.kh;
            const int kt = r / g.kh;
            const float* src =
                cols + (static_cast<std::size_t>(c) * kvol + kidx) * spatial;
            for (int t = 0; t < ot; ++t) {
                const int it = t * g.st - g.pt + kt;
                if (it < 0 || it >= g.in_t) {
                    src += static_cast<std::size_t>(oh) * ow;
                    continue;
                }
                for (int h = 0; h < oh; ++h) {
                    const int ih = h * g.sh - g.ph + kh;
                    if (ih < 0 || ih >= g.in_h) {
                        src += ow;
                        continue;
                    }
                    float* dst = plane +
                                 (static_cast<std::size_t>(it) * g.in_h + ih) * g.in_w;
                    const int iw0 = -g.pw + kw;
                    for (int w = 0; w < ow; ++w) {
                        const int iw = iw0 + w * g.sw;
                        if (iw >= 0 && iw < g.in_w) dst[iw] += src[w];
                    }
                    src += ow;
                }
            }
        }
    }
}

void conv3d_forward_cols(const Conv3dGeom& g, const float* w, const float* bias,
                         const float* cols, float* y) {
    const int rows = static_cast<int>(g.cols_rows());
    const int spatial = static_cast<int>(g.cols_cols());
    gemm_nn(g.out_c, spatial, rows, w, rows, cols, spatial, y, spatial, false);
    if (bias) {
#pragma omp parallel for schedule(static)
        for (int oc = 0; oc < g.out_c; ++oc) {
            float* dst = y + static_cast<std::size_t>(oc) * spatial;
            const float b = bias[oc];
            for (int i = 0; i < spatial; ++i) dst[i] += b;
        }
    }
}

}  // namespace trident::kernels
