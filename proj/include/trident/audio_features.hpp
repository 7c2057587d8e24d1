#pragma once

#include <filesystem>
#include <vector>

#include "trident/core_types.hpp"

namespace trident::audio {

// Frame/filterbank parameters for the 40x40 cepstral grid. 11,025 samples
// with frame 1024 and hop 256 yield exactly 40 frames; triangular mel
// filters span 0 Hz to Nyquist and the DCT-II is orthonormal.
struct MfccConfig {
    int frame_length = 1024;
    int hop = 256;
    int fft_size = 1024;
    int mel_filters = 40;
    int coefficients = 40;
    double log_floor = 1e-10;

    int frame_count(int n_samples) const {
        return 1 + (n_samples - frame_length) / hop;
    }
    void validate() const;
};

// Splits a segment into Hann-windowed frames; frame t starts at t*hop.
std::vector<std::vector<float>> frame_signal(const AudioSegment& segment,
                                             const MfccConfig& cfg);

// Full pipeline: window, FFT power spectrum, mel energies, log, DCT-II.
MfccGrid mfcc_extract(const AudioSegment& segment, const MfccConfig& cfg);

// Mel scale helpers (2595 * log10(1 + f / 700)).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular, area-unnormalized filterbank sampled at the FFT bin
// frequencies; rows are filters over fft_size/2 + 1 bins.
std::vector<std::vector<float>> mel_filterbank(int n_filters, int fft_size,
                                               double sample_rate);

// Reads a 0.25 s segment from a WAV file starting at `offset` samples.
// Rejects anything that is not mono 44.1 kHz.
AudioSegment load_audio_segment(const std::filesystem::path& wav,
                                std::size_t offset = 0);

}  // namespace trident::audio
