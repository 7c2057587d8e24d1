#include "trident/nn/weights_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace trident::nn {

namespace {

constexpr char kMagic[4] = {'T', 'R', 'I', 'W'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}
void put_i32(std::ofstream& out, std::int32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}
void put_f64(std::ofstream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), 8);
}
void put_str(std::ofstream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

struct Reader {
    std::ifstream in;
    std::filesystem::path path;

    void read(void* dst, std::size_t n) {
        in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (!in)
            throw std::runtime_error("corrupt or truncated weight file: " +
                                     path.string());
    }
    std::uint32_t u32() {
        std::uint32_t v;
        read(&v, 4);
        return v;
    }
    std::int32_t i32() {
        std::int32_t v;
        read(&v, 4);
        return v;
    }
    double f64() {
        double v;
        read(&v, 8);
        return v;
    }
    std::string str() {
        const std::uint32_t n = u32();
        if (n > (1u << 20))
            throw std::runtime_error("corrupt weight file: " + path.string());
        std::string s(n, '\0');
        read(s.data(), n);
        return s;
    }
};

}  // namespace

void write_weight_file(const std::filesystem::path& path, const WeightFile& wf) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write weight file: " + path.string());
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_str(out, wf.arch_id);
    put_i32(out, wf.input.c);
    put_i32(out, wf.input.t);
    put_i32(out, wf.input.h);
    put_i32(out, wf.input.w);
    put_f64(out, wf.shrink);
    put_i32(out, wf.n_frames);
    put_u32(out, static_cast<std::uint32_t>(wf.tensors.size()));
    for (const auto& [name, t] : wf.tensors) {
        put_str(out, name);
        put_u32(out, static_cast<std::uint32_t>(t.shape().size()));
        for (int d : t.shape()) put_i32(out, d);
        out.write(reinterpret_cast<const char*>(t.data()),
                  static_cast<std::streamsize>(t.size() * 4));
    }
    if (!out) throw std::runtime_error("short write: " + path.string());
}

WeightFile read_weight_file(const std::filesystem::path& path) {
    Reader r;
    r.path = path;
    r.in.open(path, std::ios::binary);
    if (!r.in)
        throw std::runtime_error("cannot open weight file: " + path.string());
    char magic[4];
    r.read(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a weight file: " + path.string());
    if (r.u32() != kVersion)
        throw std::runtime_error("unsupported weight file version: " +
                                 path.string());
    WeightFile wf;
    wf.arch_id = r.str();
    wf.input.c = r.i32();
    wf.input.t = r.i32();
    wf.input.h = r.i32();
    wf.input.w = r.i32();
    wf.shrink = r.f64();
    wf.n_frames = r.i32();
    const std::uint32_t n = r.u32();
    wf.tensors.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::string name = r.str();
        const std::uint32_t ndim = r.u32();
        if (ndim > 8)
            throw std::runtime_error("corrupt weight file: " + path.string());
        std::vector<int> shape(ndim);
        for (auto& d : shape) d = r.i32();
        Tensor t(shape);
        r.read(t.data(), t.size() * 4);
        wf.tensors.emplace_back(std::move(name), std::move(t));
    }
    return wf;
}

void save_classifier(const std::filesystem::path& path, Classifier& model) {
    WeightFile wf;
    wf.arch_id = to_string(model.arch);
    wf.input = model.input;
    wf.shrink = model.shrink;
    wf.n_frames = model.n_frames;
    for (const auto& p : model.parameters(true))
        wf.tensors.emplace_back(p.name, *p.value);
    write_weight_file(path, wf);
}

Classifier load_classifier(const std::filesystem::path& path) {
    const WeightFile wf = read_weight_file(path);
    Classifier model = build_classifier(architecture_from_string(wf.arch_id),
                                        wf.n_frames, wf.shrink);
    if (!(model.input == wf.input))
        throw std::runtime_error("weight file input spec mismatch: " +
                                 path.string());
    auto params = model.parameters(true);
    if (params.size() != wf.tensors.size())
        throw std::runtime_error("weight file tensor count mismatch: " +
                                 path.string());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& [name, t] = wf.tensors[i];
        if (name != params[i].name || t.shape() != params[i].value->shape())
            throw std::runtime_error("weight file tensor \"" + name +
                                     "\" does not match architecture " +
                                     wf.arch_id + ": " + path.string());
        *params[i].value = t;
    }
    return model;
}

}  // namespace trident::nn
