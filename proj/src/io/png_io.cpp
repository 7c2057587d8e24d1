#include "trident/io/png_io.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace trident::io {

namespace {

constexpr unsigned char kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::uint32_t rd_be32(const unsigned char* p) {
    return (std::uint32_t(p[0]) << 24) | (p[1] << 16) | (p[2] << 8) | p[3];
}

void wr_be32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

std::vector<unsigned char> zlib_inflate(const unsigned char* data,
                                        std::size_t len,
                                        std::size_t expected) {
    std::vector<unsigned char> out(expected);
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) throw std::runtime_error("inflateInit failed");
    zs.next_in = const_cast<Bytef*>(data);
    zs.avail_in = static_cast<uInt>(len);
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.avail_out != 0)
        throw std::runtime_error("corrupt zlib stream in PNG");
    return out;
}

std::vector<unsigned char> zlib_deflate(const unsigned char* data,
                                        std::size_t len) {
    uLongf bound = compressBound(static_cast<uLong>(len));
    std::vector<unsigned char> out(bound);
    if (compress2(out.data(), &bound, data, static_cast<uLong>(len), 1) != Z_OK)
        throw std::runtime_error("deflate failed");
    out.resize(bound);
    return out;
}

}  // namespace

ImageU8 read_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open png: " + path.string());
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < 8 || std::memcmp(buf.data(), kSig, 8) != 0)
        throw std::runtime_error("not a PNG file: " + path.string());

    int w = 0, h = 0, bit_depth = 0, color_type = 0;
    std::vector<unsigned char> idat;
    std::size_t pos = 8;
    while (pos + 12 <= buf.size()) {
        const std::uint32_t len = rd_be32(buf.data() + pos);
        const unsigned char* type = buf.data() + pos + 4;
        const unsigned char* body = buf.data() + pos + 8;
        if (pos + 12 + len > buf.size())
            throw std::runtime_error("truncated PNG chunk: " + path.string());
        if (std::memcmp(type, "IHDR", 4) == 0) {
            w = static_cast<int>(rd_be32(body));
            h = static_cast<int>(rd_be32(body + 4));
            bit_depth = body[8];
            color_type = body[9];
            if (body[12] != 0)
                throw std::runtime_error("interlaced PNG unsupported: " +
                                         path.string());
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), body, body + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            break;
        }
        pos += 12 + len;
    }
    if (w <= 0 || h <= 0 || idat.empty())
        throw std::runtime_error("undecodable PNG: " + path.string());
    if (bit_depth != 8)
        throw std::runtime_error("only 8-bit PNG supported: " + path.string());

    int src_ch = 0;
    switch (color_type) {
        case 0: src_ch = 1; break;
        case 2: src_ch = 3; break;
        case 4: src_ch = 2; break;
        case 6: src_ch = 4; break;
        default:
            throw std::runtime_error("unsupported PNG color type: " +
                                     path.string());
    }

    const std::size_t stride = static_cast<std::size_t>(w) * src_ch;
    const std::size_t raw_len = (stride + 1) * h;
    std::vector<unsigned char> raw = zlib_inflate(idat.data(), idat.size(), raw_len);

    // Undo per-row filters in place.
    std::vector<unsigned char> img(stride * h);
    for (int y = 0; y < h; ++y) {
        const unsigned char filter = raw[(stride + 1) * y];
        const unsigned char* src = raw.data() + (stride + 1) * y + 1;
        unsigned char* dst = img.data() + stride * y;
        const unsigned char* prev = y > 0 ? img.data() + stride * (y - 1) : nullptr;
        for (std::size_t x = 0; x < stride; ++x) {
            const int a = x >= static_cast<std::size_t>(src_ch) ? dst[x - src_ch] : 0;
            const int b = prev ? prev[x] : 0;
            const int c = (prev && x >= static_cast<std::size_t>(src_ch))
                              ? prev[x - src_ch] : 0;
            int v = src[x];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default:
                    throw std::runtime_error("bad PNG filter byte: " + path.string());
            }
            dst[x] = static_cast<unsigned char>(v & 0xff);
        }
    }

    ImageU8 out;
    out.height = h;
    out.width = w;
    out.channels = src_ch >= 3 ? 3 : 1;
    out.pixels.resize(static_cast<std::size_t>(w) * h * out.channels);
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i) {
        for (int c = 0; c < out.channels; ++c)
            out.pixels[i * out.channels + c] = img[i * src_ch + c];
    }
    return out;
}

void write_png(const std::filesystem::path& path, const ImageU8& img) {
    if (img.channels != 1 && img.channels != 3)
        throw std::invalid_argument("png writer takes 1- or 3-channel images");
    if (img.pixels.size() !=
        static_cast<std::size_t>(img.width) * img.height * img.channels)
        throw std::invalid_argument("png image buffer size mismatch");

    const std::size_t stride =
        static_cast<std::size_t>(img.width) * img.channels;
    std::vector<unsigned char> raw((stride + 1) * img.height);
    for (int y = 0; y < img.height; ++y) {
        raw[(stride + 1) * y] = 1;  // Sub filter
        const unsigned char* src = img.pixels.data() + stride * y;
        unsigned char* dst = raw.data() + (stride + 1) * y + 1;
        for (std::size_t x = 0; x < stride; ++x) {
            const int left = x >= static_cast<std::size_t>(img.channels)
                                 ? src[x - img.channels] : 0;
            dst[x] = static_cast<unsigned char>((src[x] - left) & 0xff);
        }
    }
    const std::vector<unsigned char> compressed =
        zlib_deflate(raw.data(), raw.size());

    std::vector<unsigned char> out(kSig, kSig + 8);
    auto chunk = [&](const char* type, const std::vector<unsigned char>& body) {
        wr_be32(out, static_cast<std::uint32_t>(body.size()));
        const std::size_t crc_start = out.size();
        out.insert(out.end(), type, type + 4);
        out.insert(out.end(), body.begin(), body.end());
        const uLong crc = crc32(0, out.data() + crc_start,
                                static_cast<uInt>(out.size() - crc_start));
        wr_be32(out, static_cast<std::uint32_t>(crc));
    };

    std::vector<unsigned char> ihdr;
    wr_be32(ihdr, static_cast<std::uint32_t>(img.width));
    wr_be32(ihdr, static_cast<std::uint32_t>(img.height));
    ihdr.push_back(8);                                        // bit depth
    ihdr.push_back(img.channels == 3 ? 2 : 0);                // color type
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    chunk("IHDR", ihdr);
    chunk("IDAT", compressed);
    chunk("IEND", {});

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write png: " + path.string());
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("short png write: " + path.string());
}

}  // namespace trident::io
