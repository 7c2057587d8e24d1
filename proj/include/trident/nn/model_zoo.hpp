#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "trident/nn/layers.hpp"
#include "trident/tensor.hpp"

namespace trident::nn {

enum class Architecture { audio_lenet, audio_vgg19, resnet10_3d, mobilenet_3d };

std::string to_string(Architecture a);
Architecture architecture_from_string(const std::string& s);

// Expected per-sample input shape (C, T, H, W).
struct InputSpec {
    int c = 0, t = 0, h = 0, w = 0;
    bool operator==(const InputSpec&) const = default;
};

struct ForwardResult {
    Tensor features;  // (B, feature_dim) pre-classifier activations
    Tensor logits;    // (B, 2)
    Tensor probs;     // (B, 2) rows: (p_absent, p_present)
};

// A unimodal classifier: backbone ending in pooled features plus a 2-way
// fully-connected head with softmax. Evaluation-mode forwards are const-safe
// per instance only when not training (training mutates caches/params).
class Classifier {
public:
    Architecture arch{};
    InputSpec input;
    int feature_dim = 0;
    double shrink = 1.0;
    int n_frames = 1;

    Sequential backbone;
    std::unique_ptr<Linear> head;

    // Validates the batch against input_spec and runs backbone + head.
    ForwardResult forward(const Tensor& batch, bool train = false);

    // Gradient wrt the batch given d(loss)/d(logits); must follow a
    // forward(batch, true) on the same batch.
    Tensor backward_from_logits(const Tensor& dlogits);

    std::vector<ParamRef> parameters(bool include_buffers = false);
    std::size_t parameter_count();
    void init_params(std::uint64_t seed);
};

// Table-driven builders. shrink scales every channel width (minimum 1);
// shrink 1 reproduces the published layer widths.
Classifier build_audio_lenet(double shrink = 1.0);
Classifier build_audio_vgg19(double shrink = 1.0);
Classifier build_resnet10_3d(int n_frames, double shrink = 1.0);
Classifier build_mobilenet_3d(int n_frames, double shrink = 1.0);

Classifier build_classifier(Architecture arch, int n_frames, double shrink);

int scaled_width(int width, double shrink);

}  // namespace trident::nn
