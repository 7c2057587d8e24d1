#include "trident/nn/model_zoo.hpp"

#include <cmath>
#include <stdexcept>

namespace trident::nn {

std::string to_string(Architecture a) {
    switch (a) {
        case Architecture::audio_lenet: return "audio_lenet";
        case Architecture::audio_vgg19: return "audio_vgg19";
        case Architecture::resnet10_3d: return "resnet10_3d";
        default: return "mobilenet_3d";
    }
}

Architecture architecture_from_string(const std::string& s) {
    if (s == "audio_lenet" || s == "lenet") return Architecture::audio_lenet;
    if (s == "audio_vgg19" || s == "vgg19") return Architecture::audio_vgg19;
    if (s == "resnet10_3d" || s == "resnet10") return Architecture::resnet10_3d;
    if (s == "mobilenet_3d" || s == "mobilenet")
        return Architecture::mobilenet_3d;
    throw std::invalid_argument("unknown architecture: " + s);
}

int scaled_width(int width, double shrink) {
    return std::max(1, static_cast<int>(std::lround(width * shrink)));
}

ForwardResult Classifier::forward(const Tensor& batch, bool train) {
    if (batch.ndim() != 5 || batch.dim(1) != input.c || batch.dim(2) != input.t ||
        batch.dim(3) != input.h || batch.dim(4) != input.w) {
        throw std::invalid_argument(
            to_string(arch) + " expects (B," + std::to_string(input.c) + "," +
            std::to_string(input.t) + "," + std::to_string(input.h) + "," +
            std::to_string(input.w) + "), got " +
            Tensor::shape_str(batch.shape()));
    }
    ForwardResult r;
    r.features = backbone.forward(batch, train);
    r.logits = head->forward(Tensor(r.features), train);
    r.probs = softmax_rows(r.logits);
    return r;
}

Tensor Classifier::backward_from_logits(const Tensor& dlogits) {
    return backbone.backward(head->backward(Tensor(dlogits)));
}

std::vector<ParamRef> Classifier::parameters(bool include_buffers) {
    std::vector<ParamRef> out;
    backbone.collect_params("backbone", out);
    head->collect_params("head", out);
    if (!include_buffers) {
        std::erase_if(out, [](const ParamRef& p) { return p.buffer; });
    }
    return out;
}

std::size_t Classifier::parameter_count() {
    std::size_t n = 0;
    for (const auto& p : parameters()) n += p.value->size();
    return n;
}

void Classifier::init_params(std::uint64_t seed) {
    Rng rng = Rng::derive(seed, "init_" + to_string(arch));
    backbone.init(rng);
    head->init(rng);
}

namespace {

// conv + batchnorm + relu, the standard block of the 2D audio nets.
void add_conv_bn_relu_2d(Sequential& seq, int in_c, int out_c, int k) {
    const int pad = k / 2;
    seq.emplace<Conv3d>(in_c, out_c, 1, k, k, 1, 1, 1, 0, pad, pad, false);
    seq.emplace<BatchNorm3d>(out_c);
    seq.emplace<ReLU>();
}

void add_pool2(Sequential& seq) {
    seq.emplace<MaxPool3d>(1, 2, 2, 1, 2, 2, 0, 0, 0);
}

}  // namespace

Classifier build_audio_lenet(double shrink) {
    Classifier c;
    c.arch = Architecture::audio_lenet;
    c.input = {1, 1, 40, 40};
    c.shrink = shrink;
    c.n_frames = 1;

    const int w1 = scaled_width(8, shrink), w2 = scaled_width(16, shrink);
    const int w3 = scaled_width(24, shrink), w4 = scaled_width(32, shrink);

    add_conv_bn_relu_2d(c.backbone, 1, w1, 5);   // 40 -> 40
    static_cast<Conv3d*>(c.backbone.at(0))->mark_first();
    add_pool2(c.backbone);                       // -> 20
    add_conv_bn_relu_2d(c.backbone, w1, w2, 3);
    add_pool2(c.backbone);                       // -> 10
    add_conv_bn_relu_2d(c.backbone, w2, w3, 3);
    add_pool2(c.backbone);                       // -> 5
    add_conv_bn_relu_2d(c.backbone, w3, w4, 3);
    add_pool2(c.backbone);                       // -> 2
    c.backbone.emplace<GlobalAvgPool>();

    c.feature_dim = w4;
    c.head = std::make_unique<Linear>(w4, 2);
    return c;
}

Classifier build_audio_vgg19(double shrink) {
    Classifier c;
    c.arch = Architecture::audio_vgg19;
    c.input = {1, 1, 40, 40};
    c.shrink = shrink;
    c.n_frames = 1;

    // 16 conv layers in 8 two-conv blocks; pooling after blocks 1, 2, 4, 8.
    // Convolutions carry biases (no batch norm in this net).
    const int widths[8][2] = {{64, 64},   {128, 128}, {128, 256}, {256, 256},
                              {256, 512}, {512, 512}, {512, 512}, {512, 512}};
    const bool pool_after[8] = {true, true, false, true,
                                false, false, false, true};
    int in_c = 1;
    for (int blk = 0; blk < 8; ++blk) {
        for (int j = 0; j < 2; ++j) {
            const int out_c = scaled_width(widths[blk][j], shrink);
            auto* conv = c.backbone.emplace<Conv3d>(in_c, out_c, 1, 3, 3, 1, 1,
                                                    1, 0, 1, 1, true);
            if (blk == 0 && j == 0) conv->mark_first();
            c.backbone.emplace<ReLU>();
            in_c = out_c;
        }
        if (pool_after[blk]) add_pool2(c.backbone);  // 40->20->10->5->2
    }
    c.backbone.emplace<GlobalAvgPool>();

    c.feature_dim = in_c;
    c.head = std::make_unique<Linear>(in_c, 2);
    return c;
}

namespace {

// Bottleneck3D(in, out) with an expansion-4 middle width, paired with a
// 1x1x1 downsample projection. Spatial stride lives on the 3x3x3 conv and
// on the projection; time is never strided so N = 1 inputs work unchanged.
std::unique_ptr<ResidualBlock> bottleneck3d(int in_c, int out_c, int stride) {
    auto block = std::make_unique<ResidualBlock>();
    const int mid = std::max(1, out_c / 4);
    block->main.emplace<Conv3d>(in_c, mid, 1, 1, 1, 1, 1, 1, 0, 0, 0, false);
    block->main.emplace<BatchNorm3d>(mid);
    block->main.emplace<ReLU>();
    block->main.emplace<Conv3d>(mid, mid, 3, 3, 3, 1, stride, stride, 1, 1, 1,
                                false);
    block->main.emplace<BatchNorm3d>(mid);
    block->main.emplace<ReLU>();
    block->main.emplace<Conv3d>(mid, out_c, 1, 1, 1, 1, 1, 1, 0, 0, 0, false);
    block->main.emplace<BatchNorm3d>(out_c);
    block->shortcut.emplace<Conv3d>(in_c, out_c, 1, 1, 1, 1, stride, stride, 0,
                                    0, 0, false);
    block->shortcut.emplace<BatchNorm3d>(out_c);
    return block;
}

}  // namespace

Classifier build_resnet10_3d(int n_frames, double shrink) {
    if (n_frames != 7 && n_frames != 1)
        throw std::invalid_argument("resnet10_3d supports 7 or 1 frames");
    Classifier c;
    c.arch = Architecture::resnet10_3d;
    c.input = {3, n_frames, 112, 112};
    c.shrink = shrink;
    c.n_frames = n_frames;

    const int stem = scaled_width(64, shrink);
    // stem: 7x7 spatial conv stride 2, 3x3 max pool stride 2 -> 28x28
    c.backbone.emplace<Conv3d>(3, stem, 1, 7, 7, 1, 2, 2, 0, 3, 3, false)
        ->mark_first();
    c.backbone.emplace<MaxPool3d>(1, 3, 3, 1, 2, 2, 0, 1, 1);
    c.backbone.emplace<BatchNorm3d>(stem);
    c.backbone.emplace<ReLU>();

    const int stage_widths[4] = {256, 512, 1024, 2048};
    const int stage_strides[4] = {1, 2, 2, 2};  // 28 -> 28, 14, 7, 4
    int in_c = stem;
    for (int s = 0; s < 4; ++s) {
        const int out_c = scaled_width(stage_widths[s], shrink);
        c.backbone.append(bottleneck3d(in_c, out_c, stage_strides[s]));
        in_c = out_c;
    }
    // spatio-temporal average over the remaining (N, 4, 4) map
    c.backbone.emplace<GlobalAvgPool>();

    c.feature_dim = in_c;
    c.head = std::make_unique<Linear>(in_c, 2);
    return c;
}

Classifier build_mobilenet_3d(int n_frames, double shrink) {
    if (n_frames != 7 && n_frames != 1)
        throw std::invalid_argument("mobilenet_3d supports 7 or 1 frames");
    Classifier c;
    c.arch = Architecture::mobilenet_3d;
    c.input = {3, n_frames, 112, 112};
    c.shrink = shrink;
    c.n_frames = n_frames;

    // MBConv3D = Conv3D + BN + ReLU. Spatial stride 2 wherever the width
    // grows, following the published width ladder up to 1024.
    const int mb[13][2] = {{32, 64},   {64, 128},  {128, 128}, {128, 256},
                           {256, 256}, {256, 512}, {512, 512}, {512, 512},
                           {512, 512}, {512, 512}, {512, 512}, {512, 1024},
                           {1024, 1024}};

    const int stem = scaled_width(32, shrink);
    c.backbone.emplace<Conv3d>(3, stem, 3, 3, 3, 1, 2, 2, 1, 1, 1, false)
        ->mark_first();
    c.backbone.emplace<BatchNorm3d>(stem);
    c.backbone.emplace<ReLU>();  // 112 -> 56

    int in_c = stem;
    for (const auto& spec : mb) {
        const int out_c = scaled_width(spec[1], shrink);
        const int stride = spec[1] > spec[0] && spec[0] >= 64 ? 2 : 1;
        c.backbone.emplace<Conv3d>(in_c, out_c, 3, 3, 3, 1, stride, stride, 1,
                                   1, 1, false);
        c.backbone.emplace<BatchNorm3d>(out_c);
        c.backbone.emplace<ReLU>();
        in_c = out_c;
    }
    c.backbone.emplace<GlobalAvgPool>();

    c.feature_dim = in_c;
    c.head = std::make_unique<Linear>(in_c, 2);
    return c;
}

Classifier build_classifier(Architecture arch, int n_frames, double shrink) {
    switch (arch) {
        case Architecture::audio_lenet: return build_audio_lenet(shrink);
        case Architecture::audio_vgg19: return build_audio_vgg19(shrink);
        case Architecture::resnet10_3d: return build_resnet10_3d(n_frames, shrink);
        default: return build_mobilenet_3d(n_frames, shrink);
    }
}

}  // namespace trident::nn
