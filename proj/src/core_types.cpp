#include "trident/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "trident/rng.hpp"

namespace trident {

namespace fs = std::filesystem;

PresenceFlag::PresenceFlag(int v) {
    if (v != 0 && v != 1)
        throw std::invalid_argument("presence flag must be 0 or 1");
    value = static_cast<std::uint8_t>(v);
}

std::string to_string(Lighting v) {
    return v == Lighting::daylight ? "daylight" : "sunset";
}
std::string to_string(Location v) {
    return v == Location::urban ? "urban" : "non_urban";
}
std::string to_string(Los v) { return v == Los::los ? "los" : "nlos"; }
std::string to_string(Split v) {
    switch (v) {
        case Split::train: return "train";
        case Split::val: return "val";
        default: return "test";
    }
}

namespace {

Lighting parse_lighting(const std::string& s, int line) {
    if (s == "daylight") return Lighting::daylight;
    if (s == "sunset") return Lighting::sunset;
    throw std::runtime_error("manifest line " + std::to_string(line) +
                             ": unknown lighting tag \"" + s + "\"");
}
Location parse_location(const std::string& s, int line) {
    if (s == "urban") return Location::urban;
    if (s == "non_urban") return Location::non_urban;
    throw std::runtime_error("manifest line " + std::to_string(line) +
                             ": unknown location tag \"" + s + "\"");
}
Los parse_los(const std::string& s, int line) {
    if (s == "los") return Los::los;
    if (s == "nlos") return Los::nlos;
    throw std::runtime_error("manifest line " + std::to_string(line) +
                             ": unknown los tag \"" + s + "\"");
}
Split parse_split(const std::string& s, int line) {
    if (s == "train") return Split::train;
    if (s == "val") return Split::val;
    if (s == "test") return Split::test;
    throw std::runtime_error("manifest line " + std::to_string(line) +
                             ": unknown split tag \"" + s + "\"");
}
PresenceFlag parse_label(const std::string& s, int line) {
    if (s == "drone") return PresenceFlag(1);
    if (s == "no_drone") return PresenceFlag(0);
    throw std::runtime_error("manifest line " + std::to_string(line) +
                             ": unknown label \"" + s + "\"");
}

}  // namespace

std::string ManifestEntry::recording_id() const {
    const auto pos = sample_id.rfind("_seg");
    if (pos == std::string::npos) return sample_id;
    return sample_id.substr(0, pos);
}

void AudioSegment::validate() const {
    if (sample_rate != kSampleRate)
        throw std::invalid_argument("audio segment must be 44.1 kHz");
    if (static_cast<int>(samples.size()) != kLength)
        throw std::invalid_argument("audio segment must hold 11025 samples, got " +
                                    std::to_string(samples.size()));
}

MfccGrid::MfccGrid(Tensor t) : values(std::move(t)) {
    if (values.shape() != std::vector<int>{kFrames, kCoeffs})
        throw std::invalid_argument("mfcc grid must be 40x40, got " +
                                    Tensor::shape_str(values.shape()));
}

FrameStack::FrameStack(Tensor t) : values(std::move(t)) {
    if (values.shape() != std::vector<int>{kFrames, 3, kSize, kSize})
        throw std::invalid_argument("frame stack must be (7,3,112,112), got " +
                                    Tensor::shape_str(values.shape()));
}

RfSpectrogram::RfSpectrogram(Tensor t) : values(std::move(t)) {
    if (values.shape() != std::vector<int>{1, 3, kSize, kSize})
        throw std::invalid_argument("rf spectrogram must be (1,3,112,112), got " +
                                    Tensor::shape_str(values.shape()));
}

PresenceFlag label_from_frames(std::span<const PresenceFlag> frame_labels) {
    if (frame_labels.empty()) throw std::invalid_argument("no frames");
    int m = 0;
    for (const auto& f : frame_labels) m = std::max<int>(m, f.value);
    return PresenceFlag(m);
}

std::vector<ManifestEntry> load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open manifest: " + path.string());
    const fs::path base = path.has_parent_path() ? path.parent_path() : ".";

    auto resolve = [&](const std::string& p, int line) {
        fs::path fp(p);
        if (fp.is_relative()) fp = base / fp;
        if (!fs::exists(fp))
            throw std::runtime_error("manifest line " + std::to_string(line) +
                                     ": missing file " + fp.string());
        return fp;
    };

    std::vector<ManifestEntry> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, '\t')) f.push_back(field);
        if (f.size() != 9)
            throw std::runtime_error("manifest line " + std::to_string(lineno) +
                                     ": expected 9 tab-separated fields, got " +
                                     std::to_string(f.size()));
        ManifestEntry e;
        e.sample_id = f[0];
        e.audio_path = resolve(f[1], lineno);
        e.frames_dir = resolve(f[2], lineno);
        e.iq_path = resolve(f[3], lineno);
        e.label = parse_label(f[4], lineno);
        e.tags.lighting = parse_lighting(f[5], lineno);
        e.tags.location = parse_location(f[6], lineno);
        e.tags.los = parse_los(f[7], lineno);
        e.split = parse_split(f[8], lineno);
        entries.push_back(std::move(e));
    }
    return entries;
}

void save_manifest(std::span<const ManifestEntry> entries, const fs::path& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write manifest: " + path.string());
    const fs::path base = path.has_parent_path() ? path.parent_path() : ".";
    auto rel = [&](const fs::path& p) {
        std::error_code ec;
        const fs::path r = fs::relative(p, base, ec);
        const std::string s = (ec || r.empty()) ? p.string() : r.string();
        return s;
    };
    out << "# sample_id\taudio_path\tframes_dir\tiq_path\tlabel\tlighting"
           "\tlocation\tlos\tsplit\n";
    for (const auto& e : entries) {
        out << e.sample_id << '\t' << rel(e.audio_path) << '\t'
            << rel(e.frames_dir) << '\t' << rel(e.iq_path) << '\t'
            << (e.label.present() ? "drone" : "no_drone") << '\t'
            << to_string(e.tags.lighting) << '\t' << to_string(e.tags.location)
            << '\t' << to_string(e.tags.los) << '\t' << to_string(e.split)
            << '\n';
    }
}

std::vector<ManifestEntry> split_dataset(std::vector<ManifestEntry> entries,
                                         const SplitRatios& ratios,
                                         std::uint64_t seed) {
    if (ratios.train <= 0 || ratios.val <= 0 || ratios.test <= 0)
        throw std::invalid_argument("split ratios must be positive");
    if (std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
        throw std::invalid_argument("split ratios must sum to 1");

    // Recordings in first-seen order; label = any-segment-present.
    std::vector<std::string> order;
    std::map<std::string, int> rec_label;
    for (const auto& e : entries) {
        const std::string rid = e.recording_id();
        auto [it, inserted] = rec_label.try_emplace(rid, 0);
        if (inserted) order.push_back(rid);
        it->second = std::max<int>(it->second, e.label.value);
    }

    std::map<std::string, Split> assignment;
    for (int cls = 0; cls <= 1; ++cls) {
        std::vector<std::string> recs;
        for (const auto& rid : order)
            if (rec_label[rid] == cls) recs.push_back(rid);
        if (recs.empty()) continue;
        const int n = static_cast<int>(recs.size());
        if (n < 3)
            throw std::runtime_error("insufficient files: class " +
                                     std::to_string(cls) + " has " +
                                     std::to_string(n) + " recordings");
        Rng rng = Rng::derive(seed, "split_class_" + std::to_string(cls));
        for (int i = n - 1; i > 0; --i)
            std::swap(recs[i], recs[rng.uniform_int(0, i)]);
        // Train and test take the ratio floor; validation gets the remainder.
        int n_train = static_cast<int>(std::floor(ratios.train * n));
        int n_test = static_cast<int>(std::floor(ratios.test * n));
        n_train = std::max(1, n_train);
        n_test = std::max(1, n_test);
        int n_val = n - n_train - n_test;
        if (n_val < 1) {
            // tiny class: shrink train until all three splits are filled
            n_train = n - n_test - 1;
            n_val = 1;
        }
        for (int i = 0; i < n; ++i) {
            Split s = Split::test;
            if (i < n_train)
                s = Split::train;
            else if (i < n_train + n_val)
                s = Split::val;
            assignment[recs[i]] = s;
        }
    }

    for (auto& e : entries) e.split = assignment.at(e.recording_id());
    return entries;
}

}  // namespace trident
