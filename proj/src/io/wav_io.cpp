#include "trident/io/wav_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace trident::io {

namespace {

std::uint32_t rd_u32(const unsigned char* p) {
    return p[0] | (p[1] << 8) | (p[2] << 16) | (std::uint32_t(p[3]) << 24);
}
std::uint16_t rd_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}
void wr_u16(std::ofstream& out, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v),
                          static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open wav: " + path.string());
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < 44 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
        std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
        throw std::runtime_error("not a RIFF/WAVE file: " + path.string());

    int fmt_code = -1, channels = 0, bits = 0, rate = 0;
    const unsigned char* data = nullptr;
    std::size_t data_len = 0;
    std::size_t pos = 12;
    while (pos + 8 <= buf.size()) {
        const std::uint32_t len = rd_u32(buf.data() + pos + 4);
        const unsigned char* body = buf.data() + pos + 8;
        if (pos + 8 + len > buf.size())
            throw std::runtime_error("truncated wav chunk: " + path.string());
        if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0 && len >= 16) {
            fmt_code = rd_u16(body);
            channels = rd_u16(body + 2);
            rate = static_cast<int>(rd_u32(body + 4));
            bits = rd_u16(body + 14);
        } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
            data = body;
            data_len = len;
        }
        pos += 8 + len + (len & 1);
    }
    if (fmt_code < 0 || !data)
        throw std::runtime_error("wav missing fmt/data chunk: " + path.string());
    if (channels != 1)
        throw std::runtime_error("wav must be mono: " + path.string());

    WavData w;
    w.sample_rate = rate;
    if (fmt_code == 1 && bits == 16) {
        const std::size_t n = data_len / 2;
        w.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::int16_t s =
                static_cast<std::int16_t>(data[2 * i] | (data[2 * i + 1] << 8));
            w.samples[i] = static_cast<float>(s) / 32768.0f;
        }
    } else if (fmt_code == 3 && bits == 32) {
        const std::size_t n = data_len / 4;
        w.samples.resize(n);
        std::memcpy(w.samples.data(), data, n * 4);
    } else {
        throw std::runtime_error("unsupported wav encoding (need 16-bit PCM or "
                                 "32-bit float): " + path.string());
    }
    return w;
}

void write_wav(const std::filesystem::path& path,
               const std::vector<float>& samples, int sample_rate) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write wav: " + path.string());
    const std::uint32_t data_len = static_cast<std::uint32_t>(samples.size() * 2);
    out.write("RIFF", 4);
    wr_u32(out, 36 + data_len);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    wr_u32(out, 16);
    wr_u16(out, 1);  // PCM
    wr_u16(out, 1);  // mono
    wr_u32(out, static_cast<std::uint32_t>(sample_rate));
    wr_u32(out, static_cast<std::uint32_t>(sample_rate * 2));
    wr_u16(out, 2);
    wr_u16(out, 16);
    out.write("data", 4);
    wr_u32(out, data_len);
    for (float v : samples) {
        const float c = std::clamp(v, -1.0f, 1.0f);
        const long q = std::lrint(c * 32768.0f);
        const auto s = static_cast<std::int16_t>(std::clamp<long>(q, -32768, 32767));
        wr_u16(out, static_cast<std::uint16_t>(s));
    }
    if (!out) throw std::runtime_error("short write: " + path.string());
}

}  // namespace trident::io
