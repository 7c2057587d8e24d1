#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "trident/core_types.hpp"
#include "trident/rng.hpp"

namespace trident::synth {

// Generator controls. difficulty 0 produces trivially separable classes;
// raising it shrinks the drone signatures and grows the background clutter
// in every modality.
struct SynthConfig {
    int n_files = 10;
    int segments_per_file = 40;  // 10 s of 0.25 s segments
    double difficulty = 0.0;
    double class_balance = 0.5;  // fraction of drone recordings
    double p_daylight = 0.5;
    double p_urban = 0.3;
    double p_los = 0.7;
    double rf_sample_rate = 1e6;
    int frame_px = 224;  // rendered before the standard resize path
    std::uint64_t seed = 0;

    void validate() const;
};

// Per-segment presence flags for the 7 frames of each segment of a drone
// recording. Every segment keeps at least one present frame; a fraction has
// presence in only a strict subset, so the max-rule labeling is exercised.
std::vector<std::array<PresenceFlag, 7>> presence_schedule(int segments,
                                                           Rng& rng);

// Writes WAVs, PNG frame directories and I/Q binaries for every segment of
// every recording, plus a split manifest. Returns the manifest path.
// Recordings generate in parallel with per-recording seed streams.
std::filesystem::path generate_dataset(const SynthConfig& cfg,
                                       const std::filesystem::path& out_dir);

}  // namespace trident::synth
