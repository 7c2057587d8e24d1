#pragma once

#include <complex>
#include <filesystem>
#include <vector>

#include "trident/core_types.hpp"

namespace trident::rf {

// 0.25 s of complex baseband samples.
struct IqSegment {
    std::vector<std::complex<float>> samples;
    double sample_rate = 0.0;

    static std::size_t segment_length(double sample_rate) {
        return static_cast<std::size_t>(std::llround(sample_rate * 0.25));
    }
};

struct StftConfig {
    int fft_size = 1024;
    int hop = 512;  // 50% overlap
};

// Reads interleaved 32-bit little-endian floats (I, Q, I, Q, ...) and cuts
// consecutive non-overlapping 0.25 s segments; a trailing partial segment is
// dropped. An odd float count is rejected.
std::vector<IqSegment> load_iq(const std::filesystem::path& path,
                               double sample_rate);

// Writes a segment in the same format.
void write_iq(const std::filesystem::path& path,
              const std::vector<std::complex<float>>& samples);

// Hamming-windowed sliding DFT magnitude in dB, frequency axis shifted so
// 0 Hz is centered, min-max normalized to [0, 1] per segment, resized to
// 112x112 (height = frequency, width = time) and replicated to 3 channels.
RfSpectrogram stft_spectrogram(const IqSegment& segment,
                               const StftConfig& cfg = {});

// The unresized dB image, row = frequency bin (fft-shifted), col = frame.
// Exposed for tests and PNG export.
std::vector<std::vector<float>> stft_db_image(const IqSegment& segment,
                                              const StftConfig& cfg = {});

// Renders a spectrogram tensor as an 8-bit grayscale PNG for inspection.
void export_spectrogram_png(const RfSpectrogram& spec,
                            const std::filesystem::path& path);

}  // namespace trident::rf
