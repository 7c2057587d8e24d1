#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trident/nn/model_zoo.hpp"

namespace trident::train {

struct TrainConfig {
    int epochs = 20;
    int batch_size = 16;
    double lr_min = 0.001;
    double lr_max = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
};

// Cosine annealing from lr_max at epoch 0 down to lr_min at the final epoch,
// no restarts.
double cosine_lr(int epoch, const TrainConfig& cfg);

// Training data source: batches assembled from cached per-sample tensors.
// fill() must write a (B, C, T, H, W) batch for the requested indices.
class BatchSource {
public:
    virtual ~BatchSource() = default;
    virtual std::size_t size() const = 0;
    virtual void fill(std::span<const std::size_t> indices, Tensor& batch,
                      std::vector<int>& labels) const = 0;
};

struct EpochStats {
    double train_loss = 0.0;
    double val_accuracy = 0.0;  // fraction, NaN-free: 0 when no val set
    double lr = 0.0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
};

// Mean cross-entropy loss and d(loss)/d(logits) for one batch.
double cross_entropy(const Tensor& logits, std::span<const int> labels,
                     Tensor* dlogits);

// Adam state across all parameters of a model.
class AdamState {
public:
    explicit AdamState(std::vector<nn::ParamRef> params);
    void step(double lr, double beta1, double beta2, double eps);
    void zero_grads();

private:
    std::vector<nn::ParamRef> params_;
    std::vector<Tensor> m_, v_;
    long t_ = 0;
};

// Minibatch training with Adam and the cosine schedule; deterministic for a
// fixed seed. Records per-epoch mean train loss and validation accuracy.
TrainHistory train_unimodal(nn::Classifier& model, const BatchSource& train_data,
                            const BatchSource* val_data, const TrainConfig& cfg);

// Evaluation-mode accuracy of a classifier over a batch source.
double classifier_accuracy(nn::Classifier& model, const BatchSource& data,
                           int batch_size = 16);

}  // namespace trident::train
