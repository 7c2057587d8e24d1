#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trident/audio_features.hpp"
#include "trident/core_types.hpp"
#include "trident/rf_features.hpp"
#include "trident/rng.hpp"

namespace trident::augment {

// Calibrated degradation levels: joint targets for mel-cepstral distortion
// (audio), structural similarity (video) and signal-to-noise ratio (RF).
struct ScenarioPreset {
    std::string name;
    double target_mcd_db = 0.0;
    double target_ssim = 0.0;
    double snr_min_db = 0.0;
    double snr_max_db = 0.0;
};

ScenarioPreset low_noise_preset();   // 3.54 dB, 0.9597, 15-20 dB
ScenarioPreset high_noise_preset();  // 11.82 dB, 0.7271, 5-10 dB
ScenarioPreset preset_by_name(const std::string& name);

// Audio operations. Every op is optional; zero parameters mean identity.
struct AudioOps {
    double background_noise_gain = 0.0;   // gain on unit-power noise
    double harmonic_distortion = 0.0;     // [0, 1] waveshaping mix
    double pitch_shift_semitones = 0.0;
    double clicks_per_second = 0.0;
    bool mono_conversion = false;         // input is already mono: identity
    double volume_scale = 1.0;
};

// Visual operations applied identically to all 7 frames of a stack.
struct VisualOps {
    double noise_sigma = 0.0;        // additive gaussian
    bool horizontal_flip = false;
    double rotation_degrees = 0.0;   // in [-180, 180]
    double brightness = 0.0;         // additive, [0,1] domain
    double contrast = 1.0;           // multiplicative around 0.5
    double blur_sigma = 0.0;         // gaussian blur
    double salt_pepper_p = 0.0;      // per-pixel replacement probability
};

struct RfOps {
    double snr_min_db = 0.0;  // per-sample target drawn uniformly
    double snr_max_db = 0.0;
    bool enabled = false;
};

struct AugmentationConfig {
    AudioOps audio;
    VisualOps visual;
    RfOps rf;
    std::uint64_t seed = 0;
    // Calibration provenance: measured probe means.
    double achieved_mcd_db = 0.0;
    double achieved_ssim = 1.0;
};

// Single-knob intensity maps used by calibration; intensity in [0, 1].
AudioOps audio_ops_at_intensity(double intensity);
VisualOps visual_ops_at_intensity(double intensity);

AudioSegment augment_audio(const AudioSegment& segment, const AudioOps& ops,
                           Rng& rng);
FrameStack augment_visual(const FrameStack& stack, const VisualOps& ops,
                          Rng& rng);

// out = signal + alpha * noise with alpha chosen so the signal-to-scaled-noise
// ratio equals target_snr_db.
rf::IqSegment augment_rf(const rf::IqSegment& signal, const rf::IqSegment& noise,
                         double target_snr_db);

// Band-limited interference bursts used as the mixing noise source.
rf::IqSegment synth_interference(std::size_t length, double sample_rate,
                                 Rng& rng);

// Quantification metrics.
double compute_mcd(const MfccGrid& real, const MfccGrid& aug);
double compute_ssim(std::span<const float> x, std::span<const float> y,
                    int height, int width);
double compute_ssim(const FrameStack& a, const FrameStack& b);
double compute_snr(const rf::IqSegment& signal, const rf::IqSegment& noise);

// Applies one synchronized degradation across all three modalities of a
// sample. The per-sample stream is derived from (config.seed, sample_id), so
// samples can be processed in parallel and re-runs are identical.
MultiModalSample augment_sample(const MultiModalSample& sample,
                                const rf::IqSegment& raw_iq,
                                const AugmentationConfig& config,
                                const std::string& sample_id,
                                rf::IqSegment* augmented_iq = nullptr);

// Monotone bisection on one intensity scalar per modality until the probe
// mean hits the preset targets. Needs at least 20 probe samples.
AugmentationConfig calibrate_scenario(const ScenarioPreset& preset,
                                      std::span<const MultiModalSample> probes,
                                      std::uint64_t seed);

// Resolved-config text serialization (key = value lines).
void save_config(const std::filesystem::path& path,
                 const AugmentationConfig& cfg);
AugmentationConfig load_config(const std::filesystem::path& path);

// Test hook: number of augment_sample invocations in this process. The
// evaluation path without a scenario must leave this unchanged.
std::uint64_t augment_call_count();

}  // namespace trident::augment
