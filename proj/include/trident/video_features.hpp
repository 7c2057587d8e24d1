#pragma once

#include <filesystem>
#include <vector>

#include "trident/core_types.hpp"
#include "trident/io/png_io.hpp"

namespace trident::video {

// Loads frames [start_index, start_index + 7) from a directory of
// lexicographically ordered PNGs, resizes each to 112x112 with bilinear
// interpolation and scales to [0, 1].
FrameStack load_frame_stack(const std::filesystem::path& frames_dir,
                            int start_index);

// Converts one decoded image to a (3, 112, 112) slice of `dst`.
void frame_to_tensor(const io::ImageU8& img, float* dst);

// Start indices of consecutive 0.25 s windows over a frame sequence at
// 30 fps: window k starts at round(k * 7.5); windows that would run past
// total_frames are dropped.
std::vector<int> segment_to_stacks(int total_frames);

}  // namespace trident::video
