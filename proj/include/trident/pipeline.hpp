#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trident/augmentation.hpp"
#include "trident/core_types.hpp"
#include "trident/evaluation.hpp"
#include "trident/fusion.hpp"
#include "trident/nn/model_zoo.hpp"
#include "trident/training.hpp"

namespace trident::pipeline {

enum class Modality { audio, video, rf };
std::string to_string(Modality m);
Modality modality_from_string(const std::string& s);

// One fully loaded sample: model-ready tensors plus the raw I/Q needed for
// test-time mixing.
struct LoadedSample {
    std::string sample_id;
    MultiModalSample sample;
    rf::IqSegment iq;
};

LoadedSample load_sample(const ManifestEntry& e, double rf_sample_rate);

// In-memory feature store for training: MFCC grids stay float, the image
// tensors are kept as 8-bit to fit desk-scale datasets in RAM. The
// evaluation path does not use this cache; it recomputes features from the
// raw assets (optionally degraded first).
class FeatureCache {
public:
    FeatureCache() = default;

    static FeatureCache build(std::span<const ManifestEntry> entries,
                              double rf_sample_rate);
    void save(const std::filesystem::path& path) const;
    static FeatureCache load_file(const std::filesystem::path& path);

    std::size_t size() const { return ids_.size(); }
    int label(std::size_t i) const { return labels_[i]; }
    const std::string& id(std::size_t i) const { return ids_[i]; }
    const ConditionTags& tags(std::size_t i) const { return tags_[i]; }

    // Batch fillers produce (B, C, T, H, W) model inputs.
    void fill(Modality m, std::span<const std::size_t> indices, Tensor& batch,
              std::vector<int>& labels) const;

private:
    std::vector<std::string> ids_;
    std::vector<int> labels_;
    std::vector<ConditionTags> tags_;
    std::vector<std::vector<float>> mfcc_;        // 1600 floats
    std::vector<std::vector<std::uint8_t>> video_;  // 7*3*112*112
    std::vector<std::vector<std::uint8_t>> rf_;     // 3*112*112
};

// BatchSource adapter over one modality of a cache subset.
class CachedBatchSource : public train::BatchSource {
public:
    CachedBatchSource(const FeatureCache& cache, Modality m,
                      std::vector<std::size_t> subset);
    std::size_t size() const override { return subset_.size(); }
    void fill(std::span<const std::size_t> indices, Tensor& batch,
              std::vector<int>& labels) const override;

private:
    const FeatureCache& cache_;
    Modality modality_;
    std::vector<std::size_t> subset_;
};

std::vector<std::size_t> indices_of_split(std::span<const ManifestEntry> entries,
                                          Split split);
std::vector<ManifestEntry> entries_of_split(std::span<const ManifestEntry> entries,
                                            Split split);

// A detection system: one model per contributing modality plus an optional
// fusion rule. With fusion none, exactly one modality is required.
struct SystemSpec {
    enum class Fusion { none, late, gmu };

    std::vector<Modality> modalities;
    std::vector<nn::Classifier*> models;  // aligned with modalities
    Fusion fusion = Fusion::none;
    const fusion::FusionWeights* late_weights = nullptr;
    const fusion::GmuParams* gmu_params = nullptr;

    void validate() const;
    std::string describe() const;
};

// Evaluates a system over manifest entries. When a scenario config is given
// every sample is degraded (all three modalities, one per-sample stream)
// before feature extraction; without it the augmentation module is never
// invoked.
eval::MetricsReport evaluate_system(
    const SystemSpec& system, std::span<const ManifestEntry> entries,
    const std::optional<augment::AugmentationConfig>& scenario,
    double rf_sample_rate, eval::ConfusionMatrix* out_cm = nullptr);

// Evaluates several systems in one pass: each sample is loaded, degraded and
// run through every distinct model exactly once.
std::vector<eval::MetricsReport> evaluate_systems(
    std::span<const SystemSpec> systems, std::span<const ManifestEntry> entries,
    const std::optional<augment::AugmentationConfig>& scenario,
    double rf_sample_rate);

// Frozen-extractor outputs on cached features, used to fit fusion.
struct UnimodalOutputs {
    std::vector<fusion::Prediction> predictions;
    std::vector<fusion::FeatureVec> features;
    std::vector<int> labels;
};
UnimodalOutputs extract_outputs(nn::Classifier& model, const FeatureCache& cache,
                                Modality m, std::span<const std::size_t> subset,
                                int batch_size = 16);

// Spec-level fusion training entry points (frozen models + manifest data).
fusion::FusionWeights train_late_fusion(
    std::vector<nn::Classifier*> models, const std::vector<Modality>& mods,
    const FeatureCache& cache, std::span<const std::size_t> subset, int epochs,
    double lr);
fusion::GmuTrainResult train_gmu_fusion(
    std::vector<nn::Classifier*> models, const std::vector<Modality>& mods,
    const FeatureCache& cache, std::span<const std::size_t> subset,
    int hidden_dim, int epochs, double lr, std::uint64_t seed);

}  // namespace trident::pipeline
