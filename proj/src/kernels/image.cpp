#include "trident/kernels/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace trident::kernels {

void resize_bilinear(const float* src, int in_h, int in_w, float* dst,
                     int out_h, int out_w) {
    const double sy = static_cast<double>(in_h) / out_h;
    const double sx = static_cast<double>(in_w) / out_w;
    for (int y = 0; y < out_h; ++y) {
        const double fy = (y + 0.5) * sy - 0.5;
        const int y0u = static_cast<int>(std::floor(fy));
        const double wy = fy - y0u;
        const int y0 = std::clamp(y0u, 0, in_h - 1);
        const int y1 = std::clamp(y0u + 1, 0, in_h - 1);
        float* out_row = dst + static_cast<std::size_t>(y) * out_w;
        const float* r0 = src + static_cast<std::size_t>(y0) * in_w;
        const float* r1 = src + static_cast<std::size_t>(y1) * in_w;
        for (int x = 0; x < out_w; ++x) {
            const double fx = (x + 0.5) * sx - 0.5;
            const int x0u = static_cast<int>(std::floor(fx));
            const double wx = fx - x0u;
            const int x0 = std::clamp(x0u, 0, in_w - 1);
            const int x1 = std::clamp(x0u + 1, 0, in_w - 1);
            const double top = r0[x0] + wx * (r0[x1] - r0[x0]);
            const double bot = r1[x0] + wx * (r1[x1] - r1[x0]);
            out_row[x] = static_cast<float>(top + wy * (bot - top));
        }
    }
}

void resize_bilinear_chw(const float* src, int c, int in_h, int in_w,
                         float* dst, int out_h, int out_w) {
    for (int ch = 0; ch < c; ++ch) {
        resize_bilinear(src + static_cast<std::size_t>(ch) * in_h * in_w, in_h,
                        in_w, dst + static_cast<std::size_t>(ch) * out_h * out_w,
                        out_h, out_w);
    }
}

}  // namespace trident::kernels
