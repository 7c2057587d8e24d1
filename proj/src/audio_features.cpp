#include "trident/audio_features.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "trident/io/wav_io.hpp"
#include "trident/kernels/fft.hpp"

namespace trident::audio {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void MfccConfig::validate() const {
    if (frame_length > fft_size)
        throw std::invalid_argument("frame_length must not exceed fft_size");
    if (frame_count(AudioSegment::kLength) != MfccGrid::kFrames)
        throw std::invalid_argument("config does not produce 40 frames");
    if (coefficients > mel_filters)
        throw std::invalid_argument("more coefficients than mel filters");
}

std::vector<std::vector<float>> frame_signal(const AudioSegment& segment,
                                             const MfccConfig& cfg) {
    segment.validate();
    cfg.validate();
    const std::vector<float> window = kernels::hann_window(cfg.frame_length);
    const int n_frames = cfg.frame_count(AudioSegment::kLength);
    std::vector<std::vector<float>> frames(n_frames);
    for (int t = 0; t < n_frames; ++t) {
        frames[t].resize(cfg.frame_length);
        const float* src = segment.samples.data() + static_cast<std::size_t>(t) * cfg.hop;
        for (int i = 0; i < cfg.frame_length; ++i)
            frames[t][i] = src[i] * window[i];
    }
    return frames;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) {
    return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<std::vector<float>> mel_filterbank(int n_filters, int fft_size,
                                               double sample_rate) {
    const int n_bins = fft_size / 2 + 1;
    const double mel_max = hz_to_mel(sample_rate / 2.0);
    std::vector<double> edges(n_filters + 2);
    for (int i = 0; i < n_filters + 2; ++i)
        edges[i] = mel_to_hz(mel_max * i / (n_filters + 1));

    std::vector<std::vector<float>> bank(n_filters,
                                         std::vector<float>(n_bins, 0.0f));
    for (int m = 0; m < n_filters; ++m) {
        const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
        for (int k = 0; k < n_bins; ++k) {
            const double f = k * sample_rate / fft_size;
            double v = 0.0;
            if (f > lo && f < mid)
                v = (f - lo) / (mid - lo);
            else if (f >= mid && f < hi)
                v = (hi - f) / (hi - mid);
            bank[m][k] = static_cast<float>(v);
        }
    }
    return bank;
}

MfccGrid mfcc_extract(const AudioSegment& segment, const MfccConfig& cfg) {
    segment.validate();
    cfg.validate();
    const auto bank = mel_filterbank(cfg.mel_filters, cfg.fft_size,
                                     segment.sample_rate);
    const int n_bins = cfg.fft_size / 2 + 1;
    const int n_frames = cfg.frame_count(AudioSegment::kLength);
    std::vector<double> window(cfg.frame_length);
    for (int i = 0; i < cfg.frame_length; ++i)
        window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / cfg.frame_length);

    // Orthonormal DCT-II matrix (coefficients x mel_filters).
    std::vector<double> dct(static_cast<std::size_t>(cfg.coefficients) *
                            cfg.mel_filters);
    for (int k = 0; k < cfg.coefficients; ++k) {
        const double scale = k == 0 ? std::sqrt(1.0 / cfg.mel_filters)
                                    : std::sqrt(2.0 / cfg.mel_filters);
        for (int n = 0; n < cfg.mel_filters; ++n)
            dct[static_cast<std::size_t>(k) * cfg.mel_filters + n] =
                scale * std::cos(kPi * (2 * n + 1) * k / (2.0 * cfg.mel_filters));
    }

    Tensor grid({MfccGrid::kFrames, MfccGrid::kCoeffs});
#pragma omp parallel for schedule(static)
    for (int t = 0; t < n_frames; ++t) {
        std::vector<std::complex<double>> spec(cfg.fft_size, 0.0);
        const float* src =
            segment.samples.data() + static_cast<std::size_t>(t) * cfg.hop;
        for (int i = 0; i < cfg.frame_length; ++i) spec[i] = src[i] * window[i];
        kernels::fft_inplace(spec);

        std::vector<double> log_mel(cfg.mel_filters);
        for (int m = 0; m < cfg.mel_filters; ++m) {
            double e = 0.0;
            for (int k = 0; k < n_bins; ++k)
                e += bank[m][k] * std::norm(spec[k]);
            log_mel[m] = std::log(e + cfg.log_floor);
        }
        for (int k = 0; k < cfg.coefficients; ++k) {
            double acc = 0.0;
            for (int n = 0; n < cfg.mel_filters; ++n)
                acc += dct[static_cast<std::size_t>(k) * cfg.mel_filters + n] *
                       log_mel[n];
            grid[static_cast<std::size_t>(t) * MfccGrid::kCoeffs + k] =
                static_cast<float>(acc);
        }
    }
    return MfccGrid(std::move(grid));
}

AudioSegment load_audio_segment(const std::filesystem::path& wav,
                                std::size_t offset) {
    const io::WavData w = io::read_wav(wav);
    if (w.sample_rate != AudioSegment::kSampleRate)
        throw std::runtime_error("unsupported sample rate " +
                                 std::to_string(w.sample_rate) + " in " +
                                 wav.string() + " (need 44100)");
    if (w.samples.size() < offset + AudioSegment::kLength)
        throw std::runtime_error("wav too short for segment at offset " +
                                 std::to_string(offset) + ": " + wav.string());
    AudioSegment seg;
    seg.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(offset),
                       w.samples.begin() +
                           static_cast<std::ptrdiff_t>(offset + AudioSegment::kLength));
    return seg;
}

}  // namespace trident::audio
