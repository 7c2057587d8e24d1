#pragma once

#include <memory>
#include <string>
#include <vector>

#include "trident/kernels/conv.hpp"
#include "trident/rng.hpp"
#include "trident/tensor.hpp"

namespace trident::nn {

// Learnable parameter (or saved buffer, e.g. batch-norm running stats).
struct ParamRef {
    std::string name;
    Tensor* value = nullptr;
    Tensor* grad = nullptr;   // null for buffers
    bool buffer = false;
};

// Layers own their parameters and the activations needed for backward.
// forward(x, true) caches; backward must follow the matching forward.
// Tensors pass by value so layers can keep or transform their input without
// copying; callers move.
class Layer {
public:
    virtual ~Layer() = default;
    virtual Tensor forward(Tensor x, bool train) = 0;
    virtual Tensor backward(Tensor dy) = 0;
    virtual void init(Rng& rng) { (void)rng; }
    virtual void collect_params(const std::string& prefix,
                                std::vector<ParamRef>& out) {
        (void)prefix;
        (void)out;
    }
};

// 3D convolution on (B, C, T, H, W); 2D models pass T = 1 with kt = 1.
class Conv3d : public Layer {
public:
    Conv3d(int in_c, int out_c, int kt, int kh, int kw, int st, int sh, int sw,
           int pt, int ph, int pw, bool with_bias);

    Tensor forward(Tensor x, bool train) override;
    Tensor backward(Tensor dy) override;
    void init(Rng& rng) override;
    void collect_params(const std::string& prefix,
                        std::vector<ParamRef>& out) override;

    kernels::Conv3dGeom geometry(int in_t, int in_h, int in_w) const;

    // First layer of a network: backward skips the unused input gradient.
    void mark_first() { first_ = true; }

    Tensor w;   // (out_c, in_c*kt*kh*kw)
    Tensor b;   // (out_c) when with_bias
    Tensor dw;
    Tensor db;

private:
    bool is_pointwise() const;

    int in_c_, out_c_, kt_, kh_, kw_, st_, sh_, sw_, pt_, ph_, pw_;
    bool with_bias_;
    bool first_ = false;
    Tensor x_;  // cached input
};

class BatchNorm3d : public Layer {
public:
    explicit BatchNorm3d(int channels, double momentum = 0.1,
                         double eps = 1e-5);

    Tensor forward(Tensor x, bool train) override;
    Tensor backward(Tensor dy) override;
    void collect_params(const std::string& prefix,
                        std::vector<ParamRef>& out) override;

    Tensor gamma, beta, dgamma, dbeta;
    Tensor running_mean, running_var;

private:
    int channels_;
    double momentum_, eps_;
    Tensor x_hat_;
    std::vector<double> inv_std_;
};

class ReLU : public Layer {
public:
    Tensor forward(Tensor x, bool train) override;
    Tensor backward(Tensor dy) override;

private:
    std::vector<char> mask_;
};

class MaxPool3d : public Layer {
public:
    MaxPool3d(int kt, int kh, int kw, int st, int sh, int sw, int pt, int ph,
              int pw);

    Tensor forward(Tensor x, bool train) override;
    Tensor backward(Tensor dy) override;

private:
    int kt_, kh_, kw_, st_, sh_, sw_, pt_, ph_, pw_;
    std::vector<int> in_shape_;
    std::vector<std::size_t> argmax_;
};

// Collapses all of (T, H, W) to one value per channel: (B, C, T, H, W) ->
// (B, C).
class GlobalAvgPool : public Layer {
public:
    Tensor forward(Tensor x, bool train) override;
    Tensor backward(Tensor dy) override;

private:
    std::vector<int> in_shape_;
};

class Linear : public Layer {
public:
    Linear(int in_dim, int out_dim);

    Tensor forward(Tensor x, bool train) override;
    Tensor backward(Tensor dy) override;
    void init(Rng& rng) override;
    void collect_params(const std::string& prefix,
                        std::vector<ParamRef>& out) override;

    Tensor w;  // (out_dim, in_dim)
    Tensor b;  // (out_dim)
    Tensor dw, db;

    int in_dim() const { return in_dim_; }
    int out_dim() const { return out_dim_; }

private:
    int in_dim_, out_dim_;
    Tensor x_;
};

class Sequential : public Layer {
public:
    Sequential() = default;

    template <typename L, typename... Args>
    L* emplace(Args&&... args) {
        auto layer = std::make_unique<L>(std::forward<Args>(args)...);
        L* raw = layer.get();
        layers_.push_back(std::move(layer));
        return raw;
    }
    void append(std::unique_ptr<Layer> layer) {
        layers_.push_back(std::move(layer));
    }

    Tensor forward(Tensor x, bool train) override;
    Tensor backward(Tensor dy) override;
    void init(Rng& rng) override;
    void collect_params(const std::string& prefix,
                        std::vector<ParamRef>& out) override;

    std::size_t size() const { return layers_.size(); }
    Layer* at(std::size_t i) { return layers_[i].get(); }

private:
    std::vector<std::unique_ptr<Layer>> layers_;
};

// Residual unit: relu(main(x) + shortcut(x)).
class ResidualBlock : public Layer {
public:
    Sequential main;
    Sequential shortcut;

    Tensor forward(Tensor x, bool train) override;
    Tensor backward(Tensor dy) override;
    void init(Rng& rng) override;
    void collect_params(const std::string& prefix,
                        std::vector<ParamRef>& out) override;

private:
    std::vector<char> mask_;
};

// Row-wise stable softmax over (B, K).
Tensor softmax_rows(const Tensor& logits);

}  // namespace trident::nn
