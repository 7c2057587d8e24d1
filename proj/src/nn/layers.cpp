#include "trident/nn/layers.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "trident/kernels/gemm.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace trident::nn {

namespace {

void check_5d(const Tensor& x, const char* who) {
    if (x.ndim() != 5)
        throw std::invalid_argument(std::string(who) + " expects a 5D tensor, got " +
                                    Tensor::shape_str(x.shape()));
}

thread_local std::vector<float> tl_cols;
thread_local std::vector<float> tl_dcols;
thread_local std::vector<float> tl_dyt;
thread_local std::vector<float> tl_dwt;

}  // namespace

// ---------------------------------------------------------------- Conv3d

Conv3d::Conv3d(int in_c, int out_c, int kt, int kh, int kw, int st, int sh,
               int sw, int pt, int ph, int pw, bool with_bias)
    : w({out_c, in_c * kt * kh * kw}),
      b(with_bias ? Tensor({out_c}) : Tensor()),
      dw({out_c, in_c * kt * kh * kw}),
      db(with_bias ? Tensor({out_c}) : Tensor()),
      in_c_(in_c), out_c_(out_c), kt_(kt), kh_(kh), kw_(kw), st_(st), sh_(sh),
      sw_(sw), pt_(pt), ph_(ph), pw_(pw), with_bias_(with_bias) {}

kernels::Conv3dGeom Conv3d::geometry(int in_t, int in_h, int in_w) const {
    kernels::Conv3dGeom g;
    g.in_c = in_c_; g.in_t = in_t; g.in_h = in_h; g.in_w = in_w;
    g.out_c = out_c_;
    g.kt = kt_; g.kh = kh_; g.kw = kw_;
    g.st = st_; g.sh = sh_; g.sw = sw_;
    g.pt = pt_; g.ph = ph_; g.pw = pw_;
    return g;
}

bool Conv3d::is_pointwise() const {
    return kt_ == 1 && kh_ == 1 && kw_ == 1 && st_ == 1 && sh_ == 1 &&
           sw_ == 1 && pt_ == 0 && ph_ == 0 && pw_ == 0;
}

void Conv3d::init(Rng& rng) {
    const int fan_in = in_c_ * kt_ * kh_ * kw_;
    const float a = std::sqrt(6.0f / static_cast<float>(fan_in));
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = static_cast<float>(rng.uniform(-a, a));
    if (with_bias_) b.fill(0.0f);
}

void Conv3d::collect_params(const std::string& prefix,
                            std::vector<ParamRef>& out) {
    out.push_back({prefix + ".w", &w, &dw, false});
    if (with_bias_) out.push_back({prefix + ".b", &b, &db, false});
}

Tensor Conv3d::forward(Tensor x, bool train) {
    check_5d(x, "Conv3d");
    if (x.dim(1) != in_c_)
        throw std::invalid_argument("Conv3d channel mismatch: expected " +
                                    std::to_string(in_c_) + ", got " +
                                    std::to_string(x.dim(1)));
    const int B = x.dim(0);
    const auto g = geometry(x.dim(2), x.dim(3), x.dim(4));
    const int K = static_cast<int>(g.cols_rows());
    const int S = static_cast<int>(g.cols_cols());
    Tensor y = Tensor::uninitialized({B, out_c_, g.out_t(), g.out_h(), g.out_w()});

    // Samples run in parallel; the kernels inside see an active parallel
    // region and execute serially on their thread.
    const bool pointwise = is_pointwise();
#pragma omp parallel for schedule(static)
    for (int n = 0; n < B; ++n) {
        const float* xb = x.data() + static_cast<std::size_t>(n) * g.in_size();
        const float* cols = xb;
        if (!pointwise) {
            tl_cols.resize(static_cast<std::size_t>(K) * S);
            kernels::im2col_3d(g, xb, tl_cols.data());
            cols = tl_cols.data();
        }
        kernels::conv3d_forward_cols(
            g, w.data(), with_bias_ ? b.data() : nullptr, cols,
            y.data() + static_cast<std::size_t>(n) * g.out_size());
    }
    if (train) x_ = std::move(x);
    return y;
}

Tensor Conv3d::backward(Tensor dy) {
    const auto g = geometry(x_.dim(2), x_.dim(3), x_.dim(4));
    const int B = x_.dim(0);
    const int K = static_cast<int>(g.cols_rows());
    const int S = static_cast<int>(g.cols_cols());
    Tensor dx = Tensor::uninitialized(x_.shape());
    const bool pointwise = is_pointwise();

    // Per-thread weight-gradient partials, reduced in thread order below, so
    // a run is deterministic for a fixed thread count.
    int n_threads = 1;
#ifdef _OPENMP
    n_threads = omp_get_max_threads();
#endif
    std::vector<Tensor> dw_part(n_threads, Tensor(dw.shape()));
    std::vector<Tensor> db_part(with_bias_ ? n_threads : 0, Tensor({out_c_}));

#pragma omp parallel for schedule(static)
    for (int n = 0; n < B; ++n) {
        int tid = 0;
#ifdef _OPENMP
        tid = omp_get_thread_num();
#endif
        const float* xb = x_.data() + static_cast<std::size_t>(n) * g.in_size();
        const float* dyb = dy.data() + static_cast<std::size_t>(n) * g.out_size();
        const float* colp = xb;
        if (!pointwise) {
            tl_cols.resize(static_cast<std::size_t>(K) * S);
            kernels::im2col_3d(g, xb, tl_cols.data());
            colp = tl_cols.data();
        }
        // dW += dY * cols^T, computed as cols * dY^T so the big operand
        // streams once instead of being repacked transposed.
        tl_dyt.resize(static_cast<std::size_t>(S) * out_c_);
        for (int oc = 0; oc < out_c_; ++oc) {
            const float* row = dyb + static_cast<std::size_t>(oc) * S;
            for (int i = 0; i < S; ++i)
                tl_dyt[static_cast<std::size_t>(i) * out_c_ + oc] = row[i];
        }
        tl_dwt.resize(static_cast<std::size_t>(K) * out_c_);
        kernels::gemm_nn(K, out_c_, S, colp, S, tl_dyt.data(), out_c_,
                         tl_dwt.data(), out_c_, false);
        {
            float* dst = dw_part[tid].data();
            for (int k = 0; k < K; ++k)
                for (int oc = 0; oc < out_c_; ++oc)
                    dst[static_cast<std::size_t>(oc) * K + k] +=
                        tl_dwt[static_cast<std::size_t>(k) * out_c_ + oc];
        }
        if (with_bias_) {
            for (int oc = 0; oc < out_c_; ++oc) {
                float acc = 0.0f;
                const float* row = dyb + static_cast<std::size_t>(oc) * S;
                for (int i = 0; i < S; ++i) acc += row[i];
                db_part[tid][oc] += acc;
            }
        }
        // dcols = W^T * dY, then fold back into dx
        if (first_) continue;
        float* dxb = dx.data() + static_cast<std::size_t>(n) * g.in_size();
        if (pointwise) {
            kernels::gemm_tn(K, S, out_c_, w.data(), K, dyb, S, dxb, S, false);
        } else {
            tl_dcols.resize(static_cast<std::size_t>(K) * S);
            kernels::gemm_tn(K, S, out_c_, w.data(), K, dyb, S, tl_dcols.data(),
                             S, false);
            kernels::col2im_3d(g, tl_dcols.data(), dxb);
        }
    }

    for (int t = 0; t < n_threads; ++t) {
        for (std::size_t i = 0; i < dw.size(); ++i) dw[i] += dw_part[t][i];
        if (with_bias_)
            for (int oc = 0; oc < out_c_; ++oc) db[oc] += db_part[t][oc];
    }
    return dx;
}

// ------------------------------------------------------------ BatchNorm3d

BatchNorm3d::BatchNorm3d(int channels, double momentum, double eps)
    : gamma({channels}, 1.0f), beta({channels}, 0.0f), dgamma({channels}),
      dbeta({channels}), running_mean({channels}, 0.0f),
      running_var({channels}, 1.0f), channels_(channels), momentum_(momentum),
      eps_(eps) {}

void BatchNorm3d::collect_params(const std::string& prefix,
                                 std::vector<ParamRef>& out) {
    out.push_back({prefix + ".gamma", &gamma, &dgamma, false});
    out.push_back({prefix + ".beta", &beta, &dbeta, false});
    out.push_back({prefix + ".running_mean", &running_mean, nullptr, true});
    out.push_back({prefix + ".running_var", &running_var, nullptr, true});
}

Tensor BatchNorm3d::forward(Tensor x, bool train) {
    check_5d(x, "BatchNorm3d");
    const int B = x.dim(0), C = x.dim(1);
    if (C != channels_)
        throw std::invalid_argument("BatchNorm3d channel mismatch");
    const std::size_t plane =
        static_cast<std::size_t>(x.dim(2)) * x.dim(3) * x.dim(4);
    const std::size_t per_sample = static_cast<std::size_t>(C) * plane;

    if (train) {
        x_hat_ = Tensor::uninitialized(x.shape());
        inv_std_.assign(C, 0.0);
        const double count = static_cast<double>(B) * plane;
#pragma omp parallel for schedule(static)
        for (int c = 0; c < C; ++c) {
            double sum = 0.0, sq = 0.0;
            for (int n = 0; n < B; ++n) {
                const float* p = x.data() + n * per_sample + c * plane;
                for (std::size_t i = 0; i < plane; ++i) {
                    sum += p[i];
                    sq += static_cast<double>(p[i]) * p[i];
                }
            }
            const double mean = sum / count;
            const double var = std::max(0.0, sq / count - mean * mean);
            const double inv = 1.0 / std::sqrt(var + eps_);
            inv_std_[c] = inv;
            running_mean[c] = static_cast<float>((1.0 - momentum_) * running_mean[c] +
                                                 momentum_ * mean);
            running_var[c] = static_cast<float>((1.0 - momentum_) * running_var[c] +
                                                momentum_ * var);
            const float g = gamma[c], bt = beta[c];
            for (int n = 0; n < B; ++n) {
                float* p = x.data() + n * per_sample + c * plane;
                float* xh = x_hat_.data() + n * per_sample + c * plane;
                for (std::size_t i = 0; i < plane; ++i) {
                    const float h = static_cast<float>((p[i] - mean) * inv);
                    xh[i] = h;
                    p[i] = g * h + bt;
                }
            }
        }
    } else {
#pragma omp parallel for schedule(static)
        for (int c = 0; c < C; ++c) {
            const double inv = 1.0 / std::sqrt(static_cast<double>(running_var[c]) + eps_);
            const double mean = running_mean[c];
            const float g = gamma[c], bt = beta[c];
            for (int n = 0; n < B; ++n) {
                float* p = x.data() + n * per_sample + c * plane;
                for (std::size_t i = 0; i < plane; ++i)
                    p[i] = static_cast<float>(g * (p[i] - mean) * inv + bt);
            }
        }
    }
    return x;
}

Tensor BatchNorm3d::backward(Tensor dy) {
    const int B = dy.dim(0), C = dy.dim(1);
    const std::size_t plane =
        static_cast<std::size_t>(dy.dim(2)) * dy.dim(3) * dy.dim(4);
    const std::size_t per_sample = static_cast<std::size_t>(C) * plane;
    const double count = static_cast<double>(B) * plane;

#pragma omp parallel for schedule(static)
    for (int c = 0; c < C; ++c) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int n = 0; n < B; ++n) {
            const float* d = dy.data() + n * per_sample + c * plane;
            const float* xh = x_hat_.data() + n * per_sample + c * plane;
            for (std::size_t i = 0; i < plane; ++i) {
                sum_dy += d[i];
                sum_dy_xhat += static_cast<double>(d[i]) * xh[i];
            }
        }
        dgamma[c] += static_cast<float>(sum_dy_xhat);
        dbeta[c] += static_cast<float>(sum_dy);
        const double mean_dy = sum_dy / count;
        const double mean_dy_xhat = sum_dy_xhat / count;
        const double scale = gamma[c] * inv_std_[c];
        for (int n = 0; n < B; ++n) {
            float* d = dy.data() + n * per_sample + c * plane;
            const float* xh = x_hat_.data() + n * per_sample + c * plane;
            for (std::size_t i = 0; i < plane; ++i)
                d[i] = static_cast<float>(
                    scale * (d[i] - mean_dy - xh[i] * mean_dy_xhat));
        }
    }
    return dy;
}

// ------------------------------------------------------------------ ReLU

Tensor ReLU::forward(Tensor x, bool train) {
    const long n = static_cast<long>(x.size());
    if (train) {
        mask_.resize(x.size());
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) {
            const bool pos = x[i] > 0.0f;
            mask_[i] = pos;
            if (!pos) x[i] = 0.0f;
        }
    } else {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i)
            if (x[i] < 0.0f) x[i] = 0.0f;
    }
    return x;
}

Tensor ReLU::backward(Tensor dy) {
    const long n = static_cast<long>(dy.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        if (!mask_[i]) dy[i] = 0.0f;
    return dy;
}

// ------------------------------------------------------------- MaxPool3d

MaxPool3d::MaxPool3d(int kt, int kh, int kw, int st, int sh, int sw, int pt,
                     int ph, int pw)
    : kt_(kt), kh_(kh), kw_(kw), st_(st), sh_(sh), sw_(sw), pt_(pt), ph_(ph),
      pw_(pw) {}

Tensor MaxPool3d::forward(Tensor x, bool train) {
    check_5d(x, "MaxPool3d");
    const int B = x.dim(0), C = x.dim(1), T = x.dim(2), H = x.dim(3),
              W = x.dim(4);
    const int ot = (T + 2 * pt_ - kt_) / st_ + 1;
    const int oh = (H + 2 * ph_ - kh_) / sh_ + 1;
    const int ow = (W + 2 * pw_ - kw_) / sw_ + 1;
    Tensor y = Tensor::uninitialized({B, C, ot, oh, ow});
    if (train) {
        in_shape_ = x.shape();
        argmax_.resize(y.size());
    }

    const std::size_t in_plane = static_cast<std::size_t>(T) * H * W;
    const std::size_t out_plane = static_cast<std::size_t>(ot) * oh * ow;
    const int planes = B * C;
#pragma omp parallel for schedule(static)
    for (int pc = 0; pc < planes; ++pc) {
        const float* src = x.data() + pc * in_plane;
        float* dst = y.data() + pc * out_plane;
        std::size_t* am = train ? argmax_.data() + pc * out_plane : nullptr;
        std::size_t o = 0;
        for (int t = 0; t < ot; ++t) {
            for (int h = 0; h < oh; ++h) {
                for (int wcol = 0; wcol < ow; ++wcol, ++o) {
                    float best = -std::numeric_limits<float>::infinity();
                    std::size_t best_i = 0;
                    for (int dt = 0; dt < kt_; ++dt) {
                        const int it = t * st_ - pt_ + dt;
                        if (it < 0 || it >= T) continue;
                        for (int dh = 0; dh < kh_; ++dh) {
                            const int ih = h * sh_ - ph_ + dh;
                            if (ih < 0 || ih >= H) continue;
                            for (int dw = 0; dw < kw_; ++dw) {
                                const int iw = wcol * sw_ - pw_ + dw;
                                if (iw < 0 || iw >= W) continue;
                                const std::size_t idx =
                                    (static_cast<std::size_t>(it) * H + ih) * W + iw;
                                if (src[idx] > best) {
                                    best = src[idx];
                                    best_i = idx;
                                }
                            }
                        }
                    }
                    dst[o] = best;
                    if (am) am[o] = best_i;
                }
            }
        }
    }
    return y;
}

Tensor MaxPool3d::backward(Tensor dy) {
    Tensor dx(in_shape_);
    const int B = in_shape_[0], C = in_shape_[1];
    const std::size_t in_plane =
        static_cast<std::size_t>(in_shape_[2]) * in_shape_[3] * in_shape_[4];
    const std::size_t out_plane = dy.size() / (static_cast<std::size_t>(B) * C);
    const int planes = B * C;
#pragma omp parallel for schedule(static)
    for (int pc = 0; pc < planes; ++pc) {
        const float* d = dy.data() + pc * out_plane;
        float* out = dx.data() + pc * in_plane;
        const std::size_t* am = argmax_.data() + pc * out_plane;
        for (std::size_t o = 0; o < out_plane; ++o) out[am[o]] += d[o];
    }
    return dx;
}

// --------------------------------------------------------- GlobalAvgPool

Tensor GlobalAvgPool::forward(Tensor x, bool train) {
    check_5d(x, "GlobalAvgPool");
    if (train) in_shape_ = x.shape();
    const int B = x.dim(0), C = x.dim(1);
    const std::size_t plane =
        static_cast<std::size_t>(x.dim(2)) * x.dim(3) * x.dim(4);
    Tensor y = Tensor::uninitialized({B, C});
    const int planes = B * C;
#pragma omp parallel for schedule(static)
    for (int pc = 0; pc < planes; ++pc) {
        const float* p = x.data() + static_cast<std::size_t>(pc) * plane;
        double acc = 0.0;
        for (std::size_t i = 0; i < plane; ++i) acc += p[i];
        y[pc] = static_cast<float>(acc / static_cast<double>(plane));
    }
    return y;
}

Tensor GlobalAvgPool::backward(Tensor dy) {
    Tensor dx = Tensor::uninitialized(in_shape_);
    const int B = in_shape_[0], C = in_shape_[1];
    const std::size_t plane =
        static_cast<std::size_t>(in_shape_[2]) * in_shape_[3] * in_shape_[4];
    const int planes = B * C;
#pragma omp parallel for schedule(static)
    for (int pc = 0; pc < planes; ++pc) {
        const float g = dy[pc] / static_cast<float>(plane);
        float* p = dx.data() + static_cast<std::size_t>(pc) * plane;
        for (std::size_t i = 0; i < plane; ++i) p[i] = g;
    }
    return dx;
}

// ---------------------------------------------------------------- Linear

Linear::Linear(int in_dim, int out_dim)
    : w({out_dim, in_dim}), b({out_dim}), dw({out_dim, in_dim}), db({out_dim}),
      in_dim_(in_dim), out_dim_(out_dim) {}

void Linear::init(Rng& rng) {
    const float a = std::sqrt(6.0f / static_cast<float>(in_dim_));
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = static_cast<float>(rng.uniform(-a, a));
    b.fill(0.0f);
}

void Linear::collect_params(const std::string& prefix,
                            std::vector<ParamRef>& out) {
    out.push_back({prefix + ".w", &w, &dw, false});
    out.push_back({prefix + ".b", &b, &db, false});
}

Tensor Linear::forward(Tensor x, bool train) {
    if (x.ndim() != 2 || x.dim(1) != in_dim_)
        throw std::invalid_argument("Linear expects (B, " +
                                    std::to_string(in_dim_) + "), got " +
                                    Tensor::shape_str(x.shape()));
    const int B = x.dim(0);
    Tensor y = Tensor::uninitialized({B, out_dim_});
    // y = x * W^T + b
    kernels::gemm_nt(B, out_dim_, in_dim_, x.data(), in_dim_, w.data(), in_dim_,
                     y.data(), out_dim_, false);
    for (int n = 0; n < B; ++n)
        for (int o = 0; o < out_dim_; ++o)
            y[static_cast<std::size_t>(n) * out_dim_ + o] += b[o];
    if (train) x_ = std::move(x);
    return y;
}

Tensor Linear::backward(Tensor dy) {
    const int B = x_.dim(0);
    // dW += dy^T * x ; dx = dy * W
    kernels::gemm_tn(out_dim_, in_dim_, B, dy.data(), out_dim_, x_.data(),
                     in_dim_, dw.data(), in_dim_, true);
    for (int n = 0; n < B; ++n)
        for (int o = 0; o < out_dim_; ++o)
            db[o] += dy[static_cast<std::size_t>(n) * out_dim_ + o];
    Tensor dx = Tensor::uninitialized({B, in_dim_});
    kernels::gemm_nn(B, in_dim_, out_dim_, dy.data(), out_dim_, w.data(),
                     in_dim_, dx.data(), in_dim_, false);
    return dx;
}

// ------------------------------------------------------------ Sequential

Tensor Sequential::forward(Tensor x, bool train) {
    for (auto& l : layers_) x = l->forward(std::move(x), train);
    return x;
}

Tensor Sequential::backward(Tensor dy) {
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it)
        dy = (*it)->backward(std::move(dy));
    return dy;
}

void Sequential::init(Rng& rng) {
    for (auto& l : layers_) l->init(rng);
}

void Sequential::collect_params(const std::string& prefix,
                                std::vector<ParamRef>& out) {
    for (std::size_t i = 0; i < layers_.size(); ++i)
        layers_[i]->collect_params(prefix + "." + std::to_string(i), out);
}

// --------------------------------------------------------- ResidualBlock

Tensor ResidualBlock::forward(Tensor x, bool train) {
    Tensor branch_in = x;  // one copy feeds the projection path
    Tensor m = main.forward(std::move(x), train);
    const Tensor s = shortcut.forward(std::move(branch_in), train);
    if (!m.same_shape(s))
        throw std::runtime_error("residual branch shapes differ: " +
                                 Tensor::shape_str(m.shape()) + " vs " +
                                 Tensor::shape_str(s.shape()));
    if (train) mask_.resize(m.size());
    const long n = static_cast<long>(m.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        const float v = m[i] + s[i];
        const bool pos = v > 0.0f;
        if (train) mask_[i] = pos;
        m[i] = pos ? v : 0.0f;
    }
    return m;
}

Tensor ResidualBlock::backward(Tensor dy) {
    const long n = static_cast<long>(dy.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        if (!mask_[i]) dy[i] = 0.0f;
    Tensor branch_d = dy;
    Tensor dx = main.backward(std::move(dy));
    const Tensor ds = shortcut.backward(std::move(branch_d));
#pragma omp parallel for schedule(static)
    for (long i = 0; i < static_cast<long>(dx.size()); ++i) dx[i] += ds[i];
    return dx;
}

void ResidualBlock::init(Rng& rng) {
    main.init(rng);
    shortcut.init(rng);
}

void ResidualBlock::collect_params(const std::string& prefix,
                                   std::vector<ParamRef>& out) {
    main.collect_params(prefix + ".main", out);
    shortcut.collect_params(prefix + ".shortcut", out);
}

// ----------------------------------------------------------------- misc

Tensor softmax_rows(const Tensor& logits) {
    if (logits.ndim() != 2)
        throw std::invalid_argument("softmax expects (B, K)");
    const int B = logits.dim(0), K = logits.dim(1);
    Tensor p = Tensor::uninitialized({B, K});
    for (int n = 0; n < B; ++n) {
        const float* z = logits.data() + static_cast<std::size_t>(n) * K;
        float* out = p.data() + static_cast<std::size_t>(n) * K;
        float mx = z[0];
        for (int k = 1; k < K; ++k) mx = std::max(mx, z[k]);
        double sum = 0.0;
        for (int k = 0; k < K; ++k) {
            out[k] = std::exp(z[k] - mx);
            sum += out[k];
        }
        for (int k = 0; k < K; ++k)
            out[k] = static_cast<float>(out[k] / sum);
    }
    return p;
}

}  // namespace trident::nn
