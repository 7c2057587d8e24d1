#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "trident/tensor.hpp"

namespace trident::fusion {

// A 2-way probability distribution: (p_absent, p_present).
using Prediction = std::array<float, 2>;
using FeatureVec = std::vector<float>;

// Decision-level fusion: non-negative learnable weights, one per modality
// (2 for dual-modal, 3 for tri-modal).
struct FusionWeights {
    std::vector<double> raw;
};

// Divides by the sum; rejects all-zero weights.
FusionWeights normalize_weights(const FusionWeights& w);

// Convex combination of the unimodal distributions under normalized weights.
Prediction late_fuse(std::span<const Prediction> preds, const FusionWeights& w);

// Gated fusion parameters. The gate projection emits one gate value per
// hidden unit per modality (sigmoid, not normalized across modalities); each
// modality is tanh-transformed to the shared hidden width first.
struct GmuParams {
    int hidden_dim = 0;
    std::vector<int> input_dims;
    Tensor w_g;                  // (G * d, sum(input_dims))
    Tensor b_g;                  // (G * d)
    std::vector<Tensor> w_y;     // per modality (d, d_m)
    std::vector<Tensor> b_y;     // per modality (d)
    Tensor head_w;               // (2, d)
    Tensor head_b;               // (2)

    int modalities() const { return static_cast<int>(input_dims.size()); }
    void validate() const;
};

GmuParams make_gmu_params(std::vector<int> input_dims, int hidden_dim,
                          std::uint64_t seed);

// Computed in double precision end to end; the float Prediction view is
// taken at the pipeline boundary.
struct GmuOutput {
    std::vector<double> fused;  // length d
    std::vector<double> gates;  // length G * d, every entry in (0, 1)
    std::array<double, 2> probs{};

    Prediction prediction() const {
        return {static_cast<float>(probs[0]), static_cast<float>(probs[1])};
    }
};

GmuOutput gmu_forward(std::span<const FeatureVec> features, const GmuParams& p);

// Analytic gradients of the cross-entropy loss for one sample, in the same
// shapes as the parameters.
struct GmuGradients {
    Tensor w_g, b_g;
    std::vector<Tensor> w_y, b_y;
    Tensor head_w, head_b;
    double loss = 0.0;
};
GmuGradients gmu_gradients(std::span<const FeatureVec> features,
                           const GmuParams& p, int label);

// Trains the late-fusion weights on cached unimodal predictions with the
// extractors frozen. Raw weights are exp-reparameterized so normalization is
// always defined; epochs = 0 returns the uniform initialization.
FusionWeights train_late_weights(
    const std::vector<std::vector<Prediction>>& preds,  // [sample][modality]
    const std::vector<int>& labels, int epochs, double lr);

// Trains gate/transform/head parameters with Adam on cross-entropy over
// cached unimodal features. Full-batch, deterministic.
struct GmuTrainResult {
    GmuParams params;
    std::vector<double> epoch_loss;
};
GmuTrainResult train_gmu(const std::vector<std::vector<FeatureVec>>& features,
                         const std::vector<int>& labels, GmuParams init,
                         int epochs, double lr);

// Persistence in the shared weight-file container.
void save_late_weights(const std::filesystem::path& path,
                       const FusionWeights& w);
FusionWeights load_late_weights(const std::filesystem::path& path);
void save_gmu_params(const std::filesystem::path& path, const GmuParams& p);
GmuParams load_gmu_params(const std::filesystem::path& path);

}  // namespace trident::fusion
