#include "trident/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "trident/rng.hpp"

namespace trident::train {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void TrainConfig::validate() const {
    if (lr_min <= 0.0 || lr_max <= 0.0 || lr_min >= lr_max)
        throw std::invalid_argument("learning-rate range must satisfy 0 < min < max");
    if (epochs < 0 || batch_size < 1)
        throw std::invalid_argument("bad epochs/batch size");
}

double cosine_lr(int epoch, const TrainConfig& cfg) {
    cfg.validate();
    const double t = std::clamp(static_cast<double>(epoch) / cfg.epochs, 0.0, 1.0);
    return cfg.lr_min + 0.5 * (cfg.lr_max - cfg.lr_min) * (1.0 + std::cos(kPi * t));
}

double cross_entropy(const Tensor& logits, std::span<const int> labels,
                     Tensor* dlogits) {
    const int B = logits.dim(0), K = logits.dim(1);
    if (static_cast<std::size_t>(B) != labels.size())
        throw std::invalid_argument("label count mismatch");
    if (dlogits) *dlogits = Tensor({B, K});
    double total = 0.0;
    for (int n = 0; n < B; ++n) {
        const float* z = logits.data() + static_cast<std::size_t>(n) * K;
        float mx = z[0];
        for (int k = 1; k < K; ++k) mx = std::max(mx, z[k]);
        double sum = 0.0;
        for (int k = 0; k < K; ++k) sum += std::exp(static_cast<double>(z[k]) - mx);
        const int y = labels[n];
        total += -(static_cast<double>(z[y]) - mx - std::log(sum));
        if (dlogits) {
            for (int k = 0; k < K; ++k) {
                const double p = std::exp(static_cast<double>(z[k]) - mx) / sum;
                (*dlogits)[static_cast<std::size_t>(n) * K + k] =
                    static_cast<float>((p - (k == y ? 1.0 : 0.0)) / B);
            }
        }
    }
    return total / B;
}

AdamState::AdamState(std::vector<nn::ParamRef> params)
    : params_(std::move(params)) {
    for (const auto& p : params_) {
        m_.emplace_back(p.value->shape());
        v_.emplace_back(p.value->shape());
    }
}

void AdamState::zero_grads() {
    for (auto& p : params_) p.grad->fill(0.0f);
}

void AdamState::step(double lr, double beta1, double beta2, double eps) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1, t_);
    const double bc2 = 1.0 - std::pow(beta2, t_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
        Tensor& w = *params_[i].value;
        const Tensor& g = *params_[i].grad;
        Tensor& m = m_[i];
        Tensor& v = v_[i];
#pragma omp parallel for schedule(static)
        for (long j = 0; j < static_cast<long>(w.size()); ++j) {
            const double gj = g[j];
            m[j] = static_cast<float>(beta1 * m[j] + (1.0 - beta1) * gj);
            v[j] = static_cast<float>(beta2 * v[j] + (1.0 - beta2) * gj * gj);
            const double mh = m[j] / bc1;
            const double vh = v[j] / bc2;
            w[j] -= static_cast<float>(lr * mh / (std::sqrt(vh) + eps));
        }
    }
}

double classifier_accuracy(nn::Classifier& model, const BatchSource& data,
                           int batch_size) {
    const std::size_t n = data.size();
    if (n == 0) return 0.0;
    std::size_t correct = 0;
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Tensor batch;
    std::vector<int> labels;
    for (std::size_t off = 0; off < n; off += batch_size) {
        const std::size_t count = std::min<std::size_t>(batch_size, n - off);
        data.fill({idx.data() + off, count}, batch, labels);
        const auto out = model.forward(batch, false);
        for (std::size_t i = 0; i < count; ++i) {
            const float* p = out.probs.data() + i * 2;
            const int pred = p[1] >= p[0] ? 1 : 0;
            if (pred == labels[i]) ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

TrainHistory train_unimodal(nn::Classifier& model, const BatchSource& train_data,
                            const BatchSource* val_data,
                            const TrainConfig& cfg) {
    cfg.validate();
    const std::size_t n = train_data.size();
    if (n == 0) throw std::invalid_argument("empty training split");

    AdamState adam(model.parameters());
    TrainHistory history;

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    Tensor batch;
    std::vector<int> labels;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng rng = Rng::derive(cfg.seed, "epoch_" + std::to_string(epoch));
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(idx[i], idx[rng.uniform_int(0, static_cast<int>(i))]);

        const double lr = cosine_lr(epoch, cfg);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t off = 0; off < n; off += cfg.batch_size) {
            const std::size_t count =
                std::min<std::size_t>(cfg.batch_size, n - off);
            train_data.fill({idx.data() + off, count}, batch, labels);
            adam.zero_grads();
            const auto out = model.forward(batch, true);
            Tensor dlogits;
            loss_sum += cross_entropy(out.logits, labels, &dlogits);
            model.backward_from_logits(dlogits);
            adam.step(lr, cfg.beta1, cfg.beta2, cfg.eps);
            ++batches;
        }

        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(batches);
        stats.lr = lr;
        stats.val_accuracy =
            val_data ? classifier_accuracy(model, *val_data, cfg.batch_size) : 0.0;
        history.epochs.push_back(stats);
    }
    return history;
}

}  // namespace trident::train
