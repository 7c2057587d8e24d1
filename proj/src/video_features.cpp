#include "trident/video_features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trident/kernels/image.hpp"

namespace trident::video {

namespace fs = std::filesystem;

void frame_to_tensor(const io::ImageU8& img, float* dst) {
    const int hw = FrameStack::kSize * FrameStack::kSize;
    std::vector<float> planar(static_cast<std::size_t>(3) * img.height * img.width);
    const std::size_t npix = static_cast<std::size_t>(img.height) * img.width;
    for (std::size_t i = 0; i < npix; ++i) {
        for (int c = 0; c < 3; ++c) {
            const std::uint8_t v = img.channels == 3 ? img.pixels[i * 3 + c]
                                                     : img.pixels[i];
            planar[static_cast<std::size_t>(c) * npix + i] = v / 255.0f;
        }
    }
    kernels::resize_bilinear_chw(planar.data(), 3, img.height, img.width, dst,
                                 FrameStack::kSize, FrameStack::kSize);
    for (int i = 0; i < 3 * hw; ++i) dst[i] = std::clamp(dst[i], 0.0f, 1.0f);
}

FrameStack load_frame_stack(const fs::path& frames_dir, int start_index) {
    std::vector<fs::path> frames;
    for (const auto& e : fs::directory_iterator(frames_dir)) {
        if (e.is_regular_file() && e.path().extension() == ".png")
            frames.push_back(e.path());
    }
    std::sort(frames.begin(), frames.end());
    if (start_index < 0 ||
        static_cast<std::size_t>(start_index) + FrameStack::kFrames > frames.size())
        throw std::runtime_error("incomplete stack: need frames [" +
                                 std::to_string(start_index) + ", " +
                                 std::to_string(start_index + FrameStack::kFrames) +
                                 ") but " + frames_dir.string() + " has " +
                                 std::to_string(frames.size()));

    Tensor t({FrameStack::kFrames, 3, FrameStack::kSize, FrameStack::kSize});
    const std::size_t frame_size =
        static_cast<std::size_t>(3) * FrameStack::kSize * FrameStack::kSize;
    for (int n = 0; n < FrameStack::kFrames; ++n) {
        const fs::path& p = frames[static_cast<std::size_t>(start_index) + n];
        io::ImageU8 img;
        try {
            img = io::read_png(p);
        } catch (const std::exception& e) {
            throw std::runtime_error("undecodable frame " + p.string() + ": " +
                                     e.what());
        }
        frame_to_tensor(img, t.data() + frame_size * n);
    }
    return FrameStack(std::move(t));
}

std::vector<int> segment_to_stacks(int total_frames) {
    if (total_frames < FrameStack::kFrames)
        throw std::invalid_argument("need at least 7 frames");
    std::vector<int> starts;
    for (int k = 0;; ++k) {
        const int start = static_cast<int>(std::lround(k * 7.5));
        if (start + FrameStack::kFrames > total_frames) break;
        starts.push_back(start);
    }
    return starts;
}

}  // namespace trident::video
