#pragma once

#include <cstddef>

namespace trident::kernels {

// Geometry of a 3D convolution on a (C, T, H, W) volume. 2D layers use
// kt = 1 with t-padding 0 and in_t = 1.
struct Conv3dGeom {
    int in_c = 0, in_t = 0, in_h = 0, in_w = 0;
    int out_c = 0;
    int kt = 1, kh = 1, kw = 1;
    int st = 1, sh = 1, sw = 1;
    int pt = 0, ph = 0, pw = 0;

    int out_t() const { return (in_t + 2 * pt - kt) / st + 1; }
    int out_h() const { return (in_h + 2 * ph - kh) / sh + 1; }
    int out_w() const { return (in_w + 2 * pw - kw) / sw + 1; }
    std::size_t cols_rows() const {
        return static_cast<std::size_t>(in_c) * kt * kh * kw;
    }
    std::size_t cols_cols() const {
        return static_cast<std::size_t>(out_t()) * out_h() * out_w();
    }
    std::size_t in_size() const {
        return static_cast<std::size_t>(in_c) * in_t * in_h * in_w;
    }
    std::size_t out_size() const {
        return static_cast<std::size_t>(out_c) * out_t() * out_h() * out_w();
    }
};

// Unfolds one (C, T, H, W) volume into a (C*kt*kh*kw) x (ot*oh*ow) matrix.
void im2col_3d(const Conv3dGeom& g, const float* x, float* cols);

// Scatter-adds a column matrix back into a zeroed (C, T, H, W) gradient.
void col2im_3d(const Conv3dGeom& g, const float* cols, float* dx);

// y = W * cols (+ bias); W is (out_c) x (in_c*kt*kh*kw), y is out_c x spatial.
// cols must hold im2col_3d(g, x). The bias pointer may be null.
void conv3d_forward_cols(const Conv3dGeom& g, const float* w, const float* bias,
                         const float* cols, float* y);

}  // namespace trident::kernels
