#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "trident/nn/model_zoo.hpp"
#include "trident/tensor.hpp"

namespace trident::nn {

// Self-describing little-endian weight container: magic + header (arch id,
// input spec, shrink, frame count) + named float32 tensors. Fusion
// parameters reuse the container with arch ids "late_fusion" / "gmu_fusion".
struct WeightFile {
    std::string arch_id;
    InputSpec input;
    double shrink = 1.0;
    int n_frames = 1;
    std::vector<std::pair<std::string, Tensor>> tensors;
};

void write_weight_file(const std::filesystem::path& path, const WeightFile& wf);
WeightFile read_weight_file(const std::filesystem::path& path);

// Persists parameters and batch-norm running stats; load rebuilds the
// classifier from the header and rejects mismatched names or shapes.
void save_classifier(const std::filesystem::path& path, Classifier& model);
Classifier load_classifier(const std::filesystem::path& path);

}  // namespace trident::nn
