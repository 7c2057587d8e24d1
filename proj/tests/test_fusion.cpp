#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "trident/fusion.hpp"
#include "trident/rng.hpp"

using namespace trident;
using namespace trident::fusion;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("fusion");

namespace {

Prediction random_pred(Rng& rng) {
    const float p = static_cast<float>(rng.uniform());
    return {1.0f - p, p};
}

FeatureVec random_features(int dim, Rng& rng) {
    FeatureVec f(dim);
    for (auto& v : f) v = rng.normal_f();
    return f;
}

// Literal transcription of the gated fusion equations in double precision.
std::pair<std::vector<double>, std::array<double, 2>> gmu_oracle(
    const std::vector<FeatureVec>& x, const GmuParams& p) {
    const int G = p.modalities();
    const int d = p.hidden_dim;
    std::vector<double> cat;
    for (const auto& f : x) cat.insert(cat.end(), f.begin(), f.end());

    std::vector<double> g(G * d);
    for (int i = 0; i < G * d; ++i) {
        double z = p.b_g[i];
        for (std::size_t j = 0; j < cat.size(); ++j)
            z += static_cast<double>(p.w_g[i * cat.size() + j]) * cat[j];
        g[i] = 1.0 / (1.0 + std::exp(-z));
    }
    std::vector<std::vector<double>> y(G, std::vector<double>(d));
    for (int m = 0; m < G; ++m)
        for (int i = 0; i < d; ++i) {
            double z = p.b_y[m][i];
            for (int j = 0; j < p.input_dims[m]; ++j)
                z += static_cast<double>(p.w_y[m][i * p.input_dims[m] + j]) *
                     x[m][j];
            y[m][i] = std::tanh(z);
        }
    std::vector<double> fused(d, 0.0);
    for (int m = 0; m < G; ++m)
        for (int i = 0; i < d; ++i) fused[i] += g[m * d + i] * y[m][i];

    double z0 = p.head_b[0], z1 = p.head_b[1];
    for (int i = 0; i < d; ++i) {
        z0 += static_cast<double>(p.head_w[i]) * fused[i];
        z1 += static_cast<double>(p.head_w[d + i]) * fused[i];
    }
    const double mx = std::max(z0, z1);
    const double e0 = std::exp(z0 - mx), e1 = std::exp(z1 - mx);
    return {fused, {e0 / (e0 + e1), e1 / (e0 + e1)}};
}

}  // namespace

TEST_CASE("weight normalization") {
    const auto a = normalize_weights({{1.0, 1.0, 1.0}});
    for (double v : a.raw) CHECK(v == doctest::Approx(1.0 / 3.0));

    const auto b = normalize_weights({{2.0, 1.0, 1.0}});
    CHECK(b.raw[0] == doctest::Approx(0.5));
    CHECK(b.raw[1] == doctest::Approx(0.25));
    CHECK(b.raw[2] == doctest::Approx(0.25));

    CHECK_THROWS_WITH_AS(normalize_weights({{0.0, 0.0, 0.0}}),
                         "degenerate fusion weights", std::invalid_argument);
    CHECK_THROWS(normalize_weights({{1.0}}));
}

TEST_CASE("late fusion arithmetic") {
    const std::vector<Prediction> preds{{0.8f, 0.2f}, {0.6f, 0.4f}, {0.9f, 0.1f}};
    const Prediction out = late_fuse(preds, {{1.0, 1.0, 1.0}});
    CHECK(out[0] == doctest::Approx(0.7667).epsilon(1e-3));
    CHECK(out[1] == doctest::Approx(0.2333).epsilon(1e-3));

    // single-modality projection
    const Prediction only_audio = late_fuse(preds, {{1.0, 0.0, 0.0}});
    CHECK(only_audio[0] == doctest::Approx(0.8f));
    CHECK(only_audio[1] == doctest::Approx(0.2f));

    std::vector<Prediction> two(preds.begin(), preds.begin() + 2);
    CHECK_THROWS(late_fuse(two, {{1.0, 1.0, 1.0}}));
}

TEST_CASE("late fusion is convex and scale invariant") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const int arity = rng.uniform_int(2, 3);
        std::vector<Prediction> preds;
        FusionWeights w;
        for (int m = 0; m < arity; ++m) {
            preds.push_back(random_pred(rng));
            w.raw.push_back(rng.uniform(0.01, 5.0));
        }
        const Prediction out = late_fuse(preds, w);
        CHECK(out[0] >= 0.0f);
        CHECK(out[1] >= 0.0f);
        CHECK(out[0] + out[1] == doctest::Approx(1.0).epsilon(1e-5));

        FusionWeights scaled = w;
        const double k = rng.uniform(0.1, 10.0);
        for (auto& v : scaled.raw) v *= k;
        const Prediction out2 = late_fuse(preds, scaled);
        CHECK(out2[0] == doctest::Approx(out[0]).epsilon(1e-5));
        CHECK((out2[1] >= out2[0]) == (out[1] >= out[0]));  // argmax invariant
    }
}

TEST_CASE("dual-modal late fusion equals tri-modal with a zeroed branch") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Prediction> three{random_pred(rng), random_pred(rng),
                                      random_pred(rng)};
        std::vector<Prediction> two(three.begin(), three.begin() + 2);
        const double wa = rng.uniform(0.1, 2.0), wb = rng.uniform(0.1, 2.0);
        const Prediction dual = late_fuse(two, {{wa, wb}});
        const Prediction tri = late_fuse(three, {{wa, wb, 0.0}});
        CHECK(dual[0] == doctest::Approx(tri[0]).epsilon(1e-6));
        CHECK(dual[1] == doctest::Approx(tri[1]).epsilon(1e-6));
    }
}

TEST_CASE("gmu: zero parameters give a uniform prediction") {
    GmuParams p = make_gmu_params({3, 4, 5}, 4, 1);
    p.w_g.fill(0.0f);
    p.b_g.fill(0.0f);
    for (auto& w : p.w_y) w.fill(0.0f);
    for (auto& b : p.b_y) b.fill(0.0f);
    p.head_w.fill(0.0f);
    p.head_b.fill(0.0f);

    Rng rng(7);
    std::vector<FeatureVec> x{random_features(3, rng), random_features(4, rng),
                              random_features(5, rng)};
    const GmuOutput out = gmu_forward(x, p);
    for (double v : out.fused) CHECK(v == 0.0);
    CHECK(out.probs[0] == doctest::Approx(0.5));
    CHECK(out.probs[1] == doctest::Approx(0.5));
}

TEST_CASE("gmu: saturated gate passes one modality through") {
    Rng rng(9);
    GmuParams p = make_gmu_params({4, 4, 4}, 4, 11);
    p.w_g.fill(0.0f);
    // bias block: +20 for modality 0, -20 for the others
    for (int i = 0; i < 4; ++i) {
        p.b_g[i] = 20.0f;
        p.b_g[4 + i] = -20.0f;
        p.b_g[8 + i] = -20.0f;
    }
    std::vector<FeatureVec> x{random_features(4, rng), random_features(4, rng),
                              random_features(4, rng)};
    const GmuOutput out = gmu_forward(x, p);
    for (int i = 0; i < 4; ++i) {
        double want = p.b_y[0][i];
        for (int j = 0; j < 4; ++j) want += p.w_y[0][i * 4 + j] * x[0][j];
        CHECK(out.fused[i] == doctest::Approx(std::tanh(want)).epsilon(1e-3));
    }
}

TEST_CASE("gmu matches a literal transcription on random instances") {
    Rng rng(13);
    for (int trial = 0; trial < 110; ++trial) {
        const int arity = rng.uniform_int(2, 3);
        std::vector<int> dims;
        std::vector<FeatureVec> x;
        for (int m = 0; m < arity; ++m) {
            dims.push_back(rng.uniform_int(2, 6));
            x.push_back(random_features(dims.back(), rng));
        }
        const GmuParams p = make_gmu_params(dims, 4, rng.next_u64());
        const GmuOutput got = gmu_forward(x, p);
        const auto [fused, probs] = gmu_oracle(x, p);
        for (int i = 0; i < 4; ++i)
            CHECK(got.fused[i] == doctest::Approx(fused[i]).epsilon(1e-9));
        CHECK(got.probs[0] == doctest::Approx(probs[0]).epsilon(1e-9));

        // gate bounds and the fused-magnitude bound
        for (double g : got.gates) {
            CHECK(g > 0.0);
            CHECK(g < 1.0);
        }
        for (int i = 0; i < 4; ++i)
            CHECK(std::fabs(got.fused[i]) <= static_cast<double>(arity));
    }
}

TEST_CASE("gmu rejects inconsistent dimensions") {
    GmuParams p = make_gmu_params({3, 4}, 4, 1);
    Rng rng(15);
    std::vector<FeatureVec> wrong{random_features(3, rng), random_features(5, rng)};
    CHECK_THROWS(gmu_forward(wrong, p));
}

TEST_CASE("late-weight training favors the informative modality") {
    Rng rng(17);
    std::vector<std::vector<Prediction>> preds;
    std::vector<int> labels;
    for (int s = 0; s < 200; ++s) {
        const int y = rng.bernoulli(0.5) ? 1 : 0;
        std::vector<Prediction> row;
        // modality 0: perfectly correct; 1 and 2: random
        row.push_back(y == 1 ? Prediction{0.05f, 0.95f} : Prediction{0.95f, 0.05f});
        row.push_back(random_pred(rng));
        row.push_back(random_pred(rng));
        preds.push_back(row);
        labels.push_back(y);
    }
    const FusionWeights w = train_late_weights(preds, labels, 300, 0.5);
    const FusionWeights n = normalize_weights(w);
    CHECK(n.raw[0] > 0.5);
}

TEST_CASE("late-weight training treats duplicate modalities symmetrically") {
    Rng rng(19);
    std::vector<std::vector<Prediction>> preds;
    std::vector<int> labels;
    for (int s = 0; s < 200; ++s) {
        const int y = rng.bernoulli(0.5) ? 1 : 0;
        const float conf = static_cast<float>(rng.uniform(0.6, 0.9));
        const Prediction p = y == 1 ? Prediction{1.0f - conf, conf}
                                    : Prediction{conf, 1.0f - conf};
        preds.push_back({p, p});
        labels.push_back(y);
    }
    const FusionWeights w =
        normalize_weights(train_late_weights(preds, labels, 200, 0.5));
    CHECK(std::fabs(w.raw[0] - w.raw[1]) < 0.05);
}

TEST_CASE("zero-epoch late training returns the uniform initialization") {
    std::vector<std::vector<Prediction>> preds{{{0.5f, 0.5f}, {0.5f, 0.5f}}};
    std::vector<int> labels{1};
    const FusionWeights w = train_late_weights(preds, labels, 0, 0.1);
    CHECK(w.raw.size() == 2);
    CHECK(w.raw[0] == doctest::Approx(1.0));
    CHECK(w.raw[1] == doctest::Approx(1.0));
    CHECK_THROWS(train_late_weights({}, {}, 1, 0.1));
}

TEST_CASE("gmu training separates a linearly separable construction") {
    Rng rng(23);
    std::vector<std::vector<FeatureVec>> feats;
    std::vector<int> labels;
    for (int s = 0; s < 120; ++s) {
        const int y = rng.bernoulli(0.5) ? 1 : 0;
        const float center = y == 1 ? 1.0f : -1.0f;
        std::vector<FeatureVec> row;
        for (int m = 0; m < 3; ++m) {
            FeatureVec f(5);
            for (auto& v : f) v = center + 0.3f * rng.normal_f();
            row.push_back(f);
        }
        feats.push_back(row);
        labels.push_back(y);
    }
    GmuParams init = make_gmu_params({5, 5, 5}, 8, 29);
    const GmuTrainResult r = train_gmu(feats, labels, std::move(init), 50, 0.05);
    CHECK(r.epoch_loss.back() <= r.epoch_loss.front());

    int correct = 0;
    for (std::size_t s = 0; s < feats.size(); ++s) {
        const GmuOutput out = gmu_forward(feats[s], r.params);
        if ((out.probs[1] >= 0.5f ? 1 : 0) == labels[s]) ++correct;
    }
    CHECK(static_cast<double>(correct) / feats.size() >= 0.95);
}

TEST_CASE("zero learning rate leaves gmu parameters unchanged") {
    Rng rng(31);
    std::vector<std::vector<FeatureVec>> feats{
        {random_features(3, rng), random_features(3, rng)}};
    std::vector<int> labels{1};
    GmuParams init = make_gmu_params({3, 3}, 4, 33);
    const Tensor w_g_before = init.w_g;
    const GmuTrainResult r = train_gmu(feats, labels, std::move(init), 5, 0.0);
    for (std::size_t i = 0; i < w_g_before.size(); ++i)
        CHECK(r.params.w_g[i] == w_g_before[i]);
}

TEST_CASE("gmu gradients match central differences at d = 4") {
    Rng rng(37);
    std::vector<FeatureVec> x{random_features(3, rng), random_features(4, rng),
                              random_features(5, rng)};
    GmuParams p = make_gmu_params({3, 4, 5}, 4, 39);
    const int label = 1;
    const GmuGradients gr = gmu_gradients(x, p, label);

    auto loss_of = [&] {
        const GmuOutput out = gmu_forward(x, p);
        return -std::log(std::max(1e-12, double(out.probs[label])));
    };
    auto check_slot = [&](float& w, double analytic) {
        const float keep = w;
        const float h = 1e-3f;
        w = keep + h;
        const double lp = loss_of();
        w = keep - h;
        const double lm = loss_of();
        w = keep;
        const double fd = (lp - lm) / (2.0 * h);
        const double err = std::fabs(analytic - fd) /
                           std::max({1.0, std::fabs(analytic), std::fabs(fd)});
        CHECK(err < 1e-3);
    };

    for (std::size_t i = 0; i < p.w_g.size(); i += 7)
        check_slot(p.w_g[i], gr.w_g[i]);
    for (std::size_t i = 0; i < p.b_g.size(); ++i)
        check_slot(p.b_g[i], gr.b_g[i]);
    for (int m = 0; m < 3; ++m)
        for (std::size_t i = 0; i < p.w_y[m].size(); i += 3)
            check_slot(p.w_y[m][i], gr.w_y[m][i]);
    for (std::size_t i = 0; i < p.head_w.size(); ++i)
        check_slot(p.head_w[i], gr.head_w[i]);
    for (std::size_t i = 0; i < p.head_b.size(); ++i)
        check_slot(p.head_b[i], gr.head_b[i]);
}

TEST_CASE("fusion parameters persist in the shared weight container") {
    const fs::path dir = fs::temp_directory_path() / "trident_fusion_io";
    fs::create_directories(dir);

    FusionWeights w{{0.5, 1.5, 2.0}};
    save_late_weights(dir / "late.w", w);
    const FusionWeights back = load_late_weights(dir / "late.w");
    REQUIRE(back.raw.size() == 3);
    for (int i = 0; i < 3; ++i)
        CHECK(back.raw[i] == doctest::Approx(w.raw[i]));

    Rng rng(41);
    GmuParams p = make_gmu_params({6, 8}, 4, 43);
    save_gmu_params(dir / "gmu.w", p);
    const GmuParams q = load_gmu_params(dir / "gmu.w");
    CHECK(q.hidden_dim == 4);
    CHECK(q.input_dims == std::vector<int>{6, 8});
    for (std::size_t i = 0; i < p.w_g.size(); ++i) CHECK(q.w_g[i] == p.w_g[i]);

    CHECK_THROWS(load_gmu_params(dir / "late.w"));
    CHECK_THROWS(load_late_weights(dir / "gmu.w"));
}

TEST_SUITE_END();
