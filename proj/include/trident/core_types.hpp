#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "trident/tensor.hpp"

namespace trident {

// Binary presence label. Internally 1 always means "drone present"; the
// report layer is the only place that converts to class indices
// (drone = class 0, no-drone = class 1).
struct PresenceFlag {
    std::uint8_t value = 0;

    PresenceFlag() = default;
    explicit PresenceFlag(int v);
    bool present() const { return value == 1; }
    bool operator==(const PresenceFlag&) const = default;
};

enum class Lighting { daylight, sunset };
enum class Location { urban, non_urban };
enum class Los { los, nlos };
enum class Split { train, val, test };

std::string to_string(Lighting v);
std::string to_string(Location v);
std::string to_string(Los v);
std::string to_string(Split v);

struct ConditionTags {
    Lighting lighting = Lighting::daylight;
    Location location = Location::non_urban;
    Los los = Los::los;
};

// One manifest record: a 0.25 s multi-modal segment with its on-disk assets.
// Segments of one recording share a sample_id prefix ("<recording>_segNNN");
// splits are always assigned per recording so neighbouring segments cannot
// leak across splits.
struct ManifestEntry {
    std::string sample_id;
    std::filesystem::path audio_path;
    std::filesystem::path frames_dir;
    std::filesystem::path iq_path;
    PresenceFlag label;
    ConditionTags tags;
    Split split = Split::train;

    std::string recording_id() const;
};

// 0.25 s of mono audio at 44.1 kHz: exactly 11,025 samples in [-1, 1].
struct AudioSegment {
    static constexpr int kSampleRate = 44100;
    static constexpr int kLength = 11025;

    std::vector<float> samples;
    int sample_rate = kSampleRate;

    void validate() const;
};

// Model-ready per-modality tensors.
struct MfccGrid {
    static constexpr int kFrames = 40;
    static constexpr int kCoeffs = 40;
    Tensor values;  // (40, 40), row = time frame

    MfccGrid() : values({kFrames, kCoeffs}) {}
    explicit MfccGrid(Tensor t);
};

struct FrameStack {
    static constexpr int kFrames = 7;
    static constexpr int kSize = 112;
    Tensor values;  // (7, 3, 112, 112) in [0, 1]

    FrameStack() : values({kFrames, 3, kSize, kSize}) {}
    explicit FrameStack(Tensor t);
};

struct RfSpectrogram {
    static constexpr int kSize = 112;
    Tensor values;  // (1, 3, 112, 112) in [0, 1]; height = frequency

    RfSpectrogram() : values({1, 3, kSize, kSize}) {}
    explicit RfSpectrogram(Tensor t);
};

// One synchronized 0.25 s unit across the three modalities.
struct MultiModalSample {
    AudioSegment audio;
    FrameStack video;
    RfSpectrogram rf;
    PresenceFlag label;
    ConditionTags tags;
};

// Segment label from per-frame labels: 1 iff any frame is 1.
PresenceFlag label_from_frames(std::span<const PresenceFlag> frame_labels);

// Tab-separated manifest, one record per line, `#` comments skipped.
// Relative paths are resolved against the manifest's directory; every path
// is checked to exist.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

// Writes entries in the same format with paths relative to the manifest dir
// where possible.
void save_manifest(std::span<const ManifestEntry> entries,
                   const std::filesystem::path& path);

struct SplitRatios {
    double train = 0.77;
    double val = 0.11;
    double test = 0.12;
};

// Assigns a split to every entry. Recordings (not segments) are shuffled and
// partitioned, stratified by recording label. Train and test take
// floor(ratio x class size) recordings per class; validation absorbs the
// rounding remainder. Deterministic for a fixed seed.
std::vector<ManifestEntry> split_dataset(std::vector<ManifestEntry> entries,
                                         const SplitRatios& ratios,
                                         std::uint64_t seed);

}  // namespace trident
