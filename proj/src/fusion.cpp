#include "trident/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trident/nn/weights_io.hpp"
#include "trident/rng.hpp"

namespace trident::fusion {

FusionWeights normalize_weights(const FusionWeights& w) {
    if (w.raw.size() != 2 && w.raw.size() != 3)
        throw std::invalid_argument("fusion takes 2 or 3 modalities");
    double sum = 0.0;
    for (double v : w.raw) {
        if (v < 0.0)
            throw std::invalid_argument("fusion weights must be non-negative");
        sum += v;
    }
    if (sum <= 0.0) throw std::invalid_argument("degenerate fusion weights");
    FusionWeights out = w;
    for (double& v : out.raw) v /= sum;
    return out;
}

Prediction late_fuse(std::span<const Prediction> preds, const FusionWeights& w) {
    if (preds.size() != w.raw.size())
        throw std::invalid_argument("prediction count does not match weight arity");
    const FusionWeights n = normalize_weights(w);
    Prediction out{0.0f, 0.0f};
    for (std::size_t m = 0; m < preds.size(); ++m) {
        out[0] += static_cast<float>(n.raw[m] * preds[m][0]);
        out[1] += static_cast<float>(n.raw[m] * preds[m][1]);
    }
    return out;
}

void GmuParams::validate() const {
    const int G = modalities();
    if (G != 2 && G != 3)
        throw std::invalid_argument("gmu takes 2 or 3 modalities");
    int sum_dims = 0;
    for (int d : input_dims) sum_dims += d;
    if (w_g.shape() != std::vector<int>{G * hidden_dim, sum_dims} ||
        b_g.shape() != std::vector<int>{G * hidden_dim})
        throw std::invalid_argument("gmu gate shapes inconsistent");
    if (static_cast<int>(w_y.size()) != G || static_cast<int>(b_y.size()) != G)
        throw std::invalid_argument("gmu needs one transform per modality");
    for (int m = 0; m < G; ++m) {
        if (w_y[m].shape() != std::vector<int>{hidden_dim, input_dims[m]} ||
            b_y[m].shape() != std::vector<int>{hidden_dim})
            throw std::invalid_argument("gmu transform shapes inconsistent");
    }
    if (head_w.shape() != std::vector<int>{2, hidden_dim} ||
        head_b.shape() != std::vector<int>{2})
        throw std::invalid_argument("gmu head shapes inconsistent");
}

GmuParams make_gmu_params(std::vector<int> input_dims, int hidden_dim,
                          std::uint64_t seed) {
    GmuParams p;
    p.hidden_dim = hidden_dim;
    p.input_dims = std::move(input_dims);
    const int G = p.modalities();
    int sum_dims = 0;
    for (int d : p.input_dims) sum_dims += d;

    Rng rng = Rng::derive(seed, "gmu_init");
    auto fill = [&](Tensor& t, int fan_in) {
        const double a = std::sqrt(6.0 / fan_in);
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] = static_cast<float>(rng.uniform(-a, a));
    };
    p.w_g = Tensor({G * hidden_dim, sum_dims});
    fill(p.w_g, sum_dims);
    p.b_g = Tensor({G * hidden_dim});
    for (int m = 0; m < G; ++m) {
        Tensor w({hidden_dim, p.input_dims[m]});
        fill(w, p.input_dims[m]);
        p.w_y.push_back(std::move(w));
        p.b_y.emplace_back(std::vector<int>{hidden_dim});
    }
    p.head_w = Tensor({2, hidden_dim});
    fill(p.head_w, hidden_dim);
    p.head_b = Tensor({2});
    p.validate();
    return p;
}

namespace {

struct GmuTrace {
    std::vector<double> x_cat;
    std::vector<double> gates;      // sigmoid outputs
    std::vector<std::vector<double>> y;  // tanh outputs per modality
    std::vector<double> fused;
    std::array<double, 2> probs{};
};

GmuTrace gmu_forward_trace(std::span<const FeatureVec> features,
                           const GmuParams& p) {
    p.validate();
    const int G = p.modalities();
    if (static_cast<int>(features.size()) != G)
        throw std::invalid_argument("feature count does not match gmu arity");
    for (int m = 0; m < G; ++m)
        if (static_cast<int>(features[m].size()) != p.input_dims[m])
            throw std::invalid_argument("gmu feature dimension mismatch");
    const int d = p.hidden_dim;

    GmuTrace tr;
    for (const auto& f : features)
        tr.x_cat.insert(tr.x_cat.end(), f.begin(), f.end());
    const int sum_dims = static_cast<int>(tr.x_cat.size());

    tr.gates.resize(G * d);
    for (int i = 0; i < G * d; ++i) {
        double acc = p.b_g[i];
        const float* row = p.w_g.data() + static_cast<std::size_t>(i) * sum_dims;
        for (int j = 0; j < sum_dims; ++j) acc += row[j] * tr.x_cat[j];
        tr.gates[i] = 1.0 / (1.0 + std::exp(-acc));
    }

    tr.y.resize(G);
    for (int m = 0; m < G; ++m) {
        tr.y[m].resize(d);
        const int dm = p.input_dims[m];
        for (int i = 0; i < d; ++i) {
            double acc = p.b_y[m][i];
            const float* row = p.w_y[m].data() + static_cast<std::size_t>(i) * dm;
            for (int j = 0; j < dm; ++j)
                acc += static_cast<double>(row[j]) * features[m][j];
            tr.y[m][i] = std::tanh(acc);
        }
    }

    tr.fused.assign(d, 0.0);
    for (int m = 0; m < G; ++m)
        for (int i = 0; i < d; ++i)
            tr.fused[i] += tr.gates[m * d + i] * tr.y[m][i];

    double z[2];
    for (int k = 0; k < 2; ++k) {
        double acc = p.head_b[k];
        for (int i = 0; i < d; ++i)
            acc += p.head_w[static_cast<std::size_t>(k) * d + i] * tr.fused[i];
        z[k] = acc;
    }
    const double mx = std::max(z[0], z[1]);
    const double e0 = std::exp(z[0] - mx), e1 = std::exp(z[1] - mx);
    tr.probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
    return tr;
}

}  // namespace

GmuOutput gmu_forward(std::span<const FeatureVec> features, const GmuParams& p) {
    GmuTrace tr = gmu_forward_trace(features, p);
    return {std::move(tr.fused), std::move(tr.gates), tr.probs};
}

GmuGradients gmu_gradients(std::span<const FeatureVec> features,
                           const GmuParams& p, int label) {
    const GmuTrace tr = gmu_forward_trace(features, p);
    const int G = p.modalities();
    const int d = p.hidden_dim;

    GmuGradients gr;
    gr.w_g = Tensor(p.w_g.shape());
    gr.b_g = Tensor(p.b_g.shape());
    gr.head_w = Tensor(p.head_w.shape());
    gr.head_b = Tensor(p.head_b.shape());
    for (int m = 0; m < G; ++m) {
        gr.w_y.emplace_back(p.w_y[m].shape());
        gr.b_y.emplace_back(p.b_y[m].shape());
    }
    gr.loss = -std::log(std::max(1e-12, tr.probs[label]));

    double dlogits[2] = {tr.probs[0], tr.probs[1]};
    dlogits[label] -= 1.0;

    std::vector<double> dfused(d, 0.0);
    for (int k = 0; k < 2; ++k) {
        gr.head_b[k] = static_cast<float>(dlogits[k]);
        for (int i = 0; i < d; ++i) {
            gr.head_w[static_cast<std::size_t>(k) * d + i] =
                static_cast<float>(dlogits[k] * tr.fused[i]);
            dfused[i] += dlogits[k] * p.head_w[static_cast<std::size_t>(k) * d + i];
        }
    }

    const int sum_dims = static_cast<int>(tr.x_cat.size());
    for (int m = 0; m < G; ++m) {
        const int dm = p.input_dims[m];
        for (int i = 0; i < d; ++i) {
            const double gate = tr.gates[m * d + i];
            const double yi = tr.y[m][i];
            const double dgate = dfused[i] * yi;
            const double dz_g = dgate * gate * (1.0 - gate);
            gr.b_g[m * d + i] = static_cast<float>(dz_g);
            float* wrow =
                gr.w_g.data() + static_cast<std::size_t>(m * d + i) * sum_dims;
            for (int j = 0; j < sum_dims; ++j)
                wrow[j] = static_cast<float>(dz_g * tr.x_cat[j]);

            const double dyi = dfused[i] * gate;
            const double du = dyi * (1.0 - yi * yi);
            gr.b_y[m][i] = static_cast<float>(du);
            float* yrow = gr.w_y[m].data() + static_cast<std::size_t>(i) * dm;
            for (int j = 0; j < dm; ++j)
                yrow[j] = static_cast<float>(du * features[m][j]);
        }
    }
    return gr;
}

FusionWeights train_late_weights(
    const std::vector<std::vector<Prediction>>& preds,
    const std::vector<int>& labels, int epochs, double lr) {
    if (preds.empty()) throw std::invalid_argument("empty training data");
    if (preds.size() != labels.size())
        throw std::invalid_argument("prediction/label count mismatch");
    const int G = static_cast<int>(preds.front().size());
    if (G != 2 && G != 3)
        throw std::invalid_argument("fusion takes 2 or 3 modalities");

    // theta free parameters; raw = exp(theta) keeps Eq-style normalization
    // defined throughout training. theta = 0 is the uniform initialization.
    std::vector<double> theta(G, 0.0);
    const std::size_t n = preds.size();

    for (int epoch = 0; epoch < epochs; ++epoch) {
        // The optimum can push one free parameter to infinity; shifting by
        // the max leaves the normalized weights unchanged and keeps exp()
        // bounded.
        const double mx = *std::max_element(theta.begin(), theta.end());
        for (double& t : theta) t -= mx;

        std::vector<double> alpha(G), grad(G, 0.0);
        double sum = 0.0;
        for (int m = 0; m < G; ++m) {
            alpha[m] = std::exp(theta[m]);
            sum += alpha[m];
        }
        for (int m = 0; m < G; ++m) alpha[m] /= sum;

        for (std::size_t s = 0; s < n; ++s) {
            double fused[2] = {0.0, 0.0};
            for (int m = 0; m < G; ++m) {
                fused[0] += alpha[m] * preds[s][m][0];
                fused[1] += alpha[m] * preds[s][m][1];
            }
            const int y = labels[s];
            const double py = std::max(fused[y], 1e-12);
            // d(-log p_y)/d alpha_m = -preds[m][y] / p_y, then through the
            // softmax that exp-normalization induces over theta.
            for (int m = 0; m < G; ++m) {
                double dot = 0.0;
                for (int k = 0; k < G; ++k) {
                    const double d_alpha_k =
                        alpha[k] * ((k == m ? 1.0 : 0.0) - alpha[m]);
                    dot += -static_cast<double>(preds[s][k][y]) / py * d_alpha_k;
                }
                grad[m] += dot;
            }
        }
        for (int m = 0; m < G; ++m)
            theta[m] -= lr * grad[m] / static_cast<double>(n);
    }

    FusionWeights out;
    out.raw.resize(G);
    const double mx = *std::max_element(theta.begin(), theta.end());
    for (int m = 0; m < G; ++m) out.raw[m] = std::exp(theta[m] - mx);
    return out;
}

GmuTrainResult train_gmu(const std::vector<std::vector<FeatureVec>>& features,
                         const std::vector<int>& labels, GmuParams init,
                         int epochs, double lr) {
    if (features.empty()) throw std::invalid_argument("empty training data");
    if (features.size() != labels.size())
        throw std::invalid_argument("feature/label count mismatch");
    init.validate();
    GmuParams p = std::move(init);
    const int G = p.modalities();
    const int d = p.hidden_dim;
    const std::size_t n = features.size();

    std::vector<Tensor*> params = {&p.w_g, &p.b_g, &p.head_w, &p.head_b};
    for (int m = 0; m < G; ++m) {
        params.push_back(&p.w_y[m]);
        params.push_back(&p.b_y[m]);
    }
    std::vector<Tensor> grads, adam_m, adam_v;
    for (Tensor* t : params) {
        grads.emplace_back(t->shape());
        adam_m.emplace_back(t->shape());
        adam_v.emplace_back(t->shape());
    }
    Tensor* g_wg = &grads[0];
    Tensor* g_bg = &grads[1];
    Tensor* g_hw = &grads[2];
    Tensor* g_hb = &grads[3];

    GmuTrainResult result;
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step = 0;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (auto& g : grads) g.fill(0.0f);
        double loss = 0.0;

        for (std::size_t s = 0; s < n; ++s) {
            const GmuGradients gr = gmu_gradients(features[s], p, labels[s]);
            loss += gr.loss;
            auto add = [](Tensor& dst, const Tensor& src) {
                for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
            };
            add(*g_wg, gr.w_g);
            add(*g_bg, gr.b_g);
            add(*g_hw, gr.head_w);
            add(*g_hb, gr.head_b);
            for (int m = 0; m < G; ++m) {
                add(grads[4 + 2 * m], gr.w_y[m]);
                add(grads[5 + 2 * m], gr.b_y[m]);
            }
        }

        result.epoch_loss.push_back(loss / static_cast<double>(n));

        ++step;
        const double bc1 = 1.0 - std::pow(beta1, step);
        const double bc2 = 1.0 - std::pow(beta2, step);
        for (std::size_t t = 0; t < params.size(); ++t) {
            Tensor& w = *params[t];
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double g = grads[t][i] / static_cast<double>(n);
                adam_m[t][i] = static_cast<float>(beta1 * adam_m[t][i] +
                                                  (1.0 - beta1) * g);
                adam_v[t][i] = static_cast<float>(beta2 * adam_v[t][i] +
                                                  (1.0 - beta2) * g * g);
                const double mh = adam_m[t][i] / bc1;
                const double vh = adam_v[t][i] / bc2;
                w[i] -= static_cast<float>(lr * mh / (std::sqrt(vh) + eps));
            }
        }
    }

    result.params = std::move(p);
    return result;
}

void save_late_weights(const std::filesystem::path& path,
                       const FusionWeights& w) {
    nn::WeightFile wf;
    wf.arch_id = "late_fusion";
    Tensor raw({static_cast<int>(w.raw.size())});
    for (std::size_t i = 0; i < w.raw.size(); ++i)
        raw[i] = static_cast<float>(w.raw[i]);
    wf.tensors.emplace_back("raw", std::move(raw));
    nn::write_weight_file(path, wf);
}

FusionWeights load_late_weights(const std::filesystem::path& path) {
    const nn::WeightFile wf = nn::read_weight_file(path);
    if (wf.arch_id != "late_fusion")
        throw std::runtime_error("not a late_fusion weight file: " +
                                 path.string());
    FusionWeights w;
    const Tensor& raw = wf.tensors.at(0).second;
    w.raw.assign(raw.data(), raw.data() + raw.size());
    return w;
}

void save_gmu_params(const std::filesystem::path& path, const GmuParams& p) {
    p.validate();
    nn::WeightFile wf;
    wf.arch_id = "gmu_fusion";
    wf.tensors.emplace_back("w_g", p.w_g);
    wf.tensors.emplace_back("b_g", p.b_g);
    for (int m = 0; m < p.modalities(); ++m) {
        wf.tensors.emplace_back("w_y_" + std::to_string(m), p.w_y[m]);
        wf.tensors.emplace_back("b_y_" + std::to_string(m), p.b_y[m]);
    }
    wf.tensors.emplace_back("head_w", p.head_w);
    wf.tensors.emplace_back("head_b", p.head_b);
    nn::write_weight_file(path, wf);
}

GmuParams load_gmu_params(const std::filesystem::path& path) {
    const nn::WeightFile wf = nn::read_weight_file(path);
    if (wf.arch_id != "gmu_fusion")
        throw std::runtime_error("not a gmu_fusion weight file: " + path.string());
    GmuParams p;
    auto find = [&](const std::string& name) -> const Tensor& {
        for (const auto& [n, t] : wf.tensors)
            if (n == name) return t;
        throw std::runtime_error("gmu weight file missing tensor " + name +
                                 ": " + path.string());
    };
    p.w_g = find("w_g");
    p.b_g = find("b_g");
    const int gd = p.b_g.dim(0);
    for (int m = 0; m < 3; ++m) {
        bool found = false;
        for (const auto& [n, t] : wf.tensors)
            if (n == "w_y_" + std::to_string(m)) found = true;
        if (!found) break;
        p.w_y.push_back(find("w_y_" + std::to_string(m)));
        p.b_y.push_back(find("b_y_" + std::to_string(m)));
        p.input_dims.push_back(p.w_y.back().dim(1));
    }
    p.hidden_dim = gd / p.modalities();
    p.head_w = find("head_w");
    p.head_b = find("head_b");
    p.validate();
    return p;
}

}  // namespace trident::fusion
