#pragma once

namespace trident::kernels {

// Bilinear resize of a single-channel float image with half-pixel centers
// (corner alignment off): src_x = (dst_x + 0.5) * in_w / out_w - 0.5,
// clamped at the borders.
void resize_bilinear(const float* src, int in_h, int in_w, float* dst,
                     int out_h, int out_w);

// Channel-planar (C, H, W) variant.
void resize_bilinear_chw(const float* src, int c, int in_h, int in_w,
                         float* dst, int out_h, int out_w);

}  // namespace trident::kernels
