#include "trident/rf_features.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "trident/io/png_io.hpp"
#include "trident/kernels/fft.hpp"
#include "trident/kernels/image.hpp"

namespace trident::rf {

std::vector<IqSegment> load_iq(const std::filesystem::path& path,
                               double sample_rate) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open iq file: " + path.string());
    in.seekg(0, std::ios::end);
    const std::streamoff bytes = in.tellg();
    in.seekg(0);
    if (bytes % 4 != 0)
        throw std::runtime_error("iq file is not a float stream: " + path.string());
    const std::size_t n_floats = static_cast<std::size_t>(bytes) / 4;
    if (n_floats % 2 != 0)
        throw std::runtime_error("unpaired I/Q in " + path.string());

    std::vector<float> raw(n_floats);
    in.read(reinterpret_cast<char*>(raw.data()), bytes);
    if (!in) throw std::runtime_error("short read: " + path.string());

    const std::size_t seg_len = IqSegment::segment_length(sample_rate);
    const std::size_t n_samples = n_floats / 2;
    const std::size_t n_segments = n_samples / seg_len;
    std::vector<IqSegment> out(n_segments);
    for (std::size_t s = 0; s < n_segments; ++s) {
        out[s].sample_rate = sample_rate;
        out[s].samples.resize(seg_len);
        const float* src = raw.data() + 2 * s * seg_len;
        for (std::size_t i = 0; i < seg_len; ++i)
            out[s].samples[i] = {src[2 * i], src[2 * i + 1]};
    }
    return out;
}

void write_iq(const std::filesystem::path& path,
              const std::vector<std::complex<float>>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write iq file: " + path.string());
    std::vector<float> raw(samples.size() * 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        raw[2 * i] = samples[i].real();
        raw[2 * i + 1] = samples[i].imag();
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * 4));
    if (!out) throw std::runtime_error("short write: " + path.string());
}

std::vector<std::vector<float>> stft_db_image(const IqSegment& segment,
                                              const StftConfig& cfg) {
    const int n = static_cast<int>(segment.samples.size());
    if (n < cfg.fft_size)
        throw std::invalid_argument("segment shorter than fft size");
    const int n_frames = (n - cfg.fft_size) / cfg.hop + 1;
    const std::vector<float> window = kernels::hamming_window(cfg.fft_size);

    // rows = frequency (fft-shifted, -fs/2 at row 0), cols = time
    std::vector<std::vector<float>> img(cfg.fft_size,
                                        std::vector<float>(n_frames));
#pragma omp parallel for schedule(static)
    for (int t = 0; t < n_frames; ++t) {
        std::vector<std::complex<double>> frame(cfg.fft_size);
        const std::complex<float>* src =
            segment.samples.data() + static_cast<std::size_t>(t) * cfg.hop;
        for (int i = 0; i < cfg.fft_size; ++i)
            frame[i] = std::complex<double>(src[i]) * static_cast<double>(window[i]);
        kernels::fft_inplace(frame);
        const int half = cfg.fft_size / 2;
        for (int k = 0; k < cfg.fft_size; ++k) {
            // fftshift: row 0 holds bin -fs/2
            const int row = (k + half) % cfg.fft_size;
            img[row][t] = static_cast<float>(
                20.0 * std::log10(std::abs(frame[k]) + 1e-12));
        }
    }
    return img;
}

RfSpectrogram stft_spectrogram(const IqSegment& segment, const StftConfig& cfg) {
    const auto img = stft_db_image(segment, cfg);
    const int rows = static_cast<int>(img.size());
    const int cols = static_cast<int>(img[0].size());

    float lo = img[0][0], hi = img[0][0];
    for (const auto& row : img)
        for (float v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const float span = hi - lo;

    std::vector<float> flat(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            flat[static_cast<std::size_t>(r) * cols + c] =
                span > 0.0f ? (img[r][c] - lo) / span : 0.0f;

    Tensor t({1, 3, RfSpectrogram::kSize, RfSpectrogram::kSize});
    const int hw = RfSpectrogram::kSize * RfSpectrogram::kSize;
    kernels::resize_bilinear(flat.data(), rows, cols, t.data(),
                             RfSpectrogram::kSize, RfSpectrogram::kSize);
    for (int i = 0; i < hw; ++i) {
        const float v = std::clamp(t[i], 0.0f, 1.0f);
        t[i] = v;
        t[hw + i] = v;
        t[2 * hw + i] = v;
    }
    return RfSpectrogram(std::move(t));
}

void export_spectrogram_png(const RfSpectrogram& spec,
                            const std::filesystem::path& path) {
    io::ImageU8 img;
    img.height = RfSpectrogram::kSize;
    img.width = RfSpectrogram::kSize;
    img.channels = 1;
    img.pixels.resize(static_cast<std::size_t>(img.height) * img.width);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = static_cast<std::uint8_t>(
            std::lround(std::clamp(spec.values[i], 0.0f, 1.0f) * 255.0f));
    io::write_png(path, img);
}

}  // namespace trident::rf
