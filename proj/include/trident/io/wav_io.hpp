#pragma once

#include <filesystem>
#include <vector>

namespace trident::io {

struct WavData {
    std::vector<float> samples;  // mono, in [-1, 1]
    int sample_rate = 0;
};

// Reads a mono PCM WAV. Accepts 16-bit integer or 32-bit float samples;
// anything else is rejected.
WavData read_wav(const std::filesystem::path& path);

// Writes mono 16-bit PCM.
void write_wav(const std::filesystem::path& path,
               const std::vector<float>& samples, int sample_rate);

}  // namespace trident::io
