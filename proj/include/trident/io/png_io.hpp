#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace trident::io {

// 8-bit interleaved RGB image.
struct ImageU8 {
    int height = 0;
    int width = 0;
    int channels = 0;  // 1 or 3
    std::vector<std::uint8_t> pixels;  // row-major, interleaved
};

// Decodes an 8-bit non-interlaced PNG (gray, gray+alpha, RGB or RGBA; alpha
// is dropped, gray is kept single-channel).
ImageU8 read_png(const std::filesystem::path& path);

// Writes an 8-bit gray or RGB PNG.
void write_png(const std::filesystem::path& path, const ImageU8& img);

}  // namespace trident::io
