#include <doctest.h>

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "trident/evaluation.hpp"
#include "trident/nn/model_zoo.hpp"
#include "trident/rng.hpp"
#include "trident/training.hpp"

using namespace trident;
using namespace trident::eval;
using namespace trident::train;

TEST_SUITE_BEGIN("training_eval");

namespace {

// In-memory separable data: class 1 gets a bright square, class 0 a dim one,
// plus noise. Shapes match the audio models.
class SyntheticSource : public BatchSource {
public:
    SyntheticSource(std::size_t n, double separation, std::uint64_t seed)
        : n_(n), separation_(separation), seed_(seed) {}

    std::size_t size() const override { return n_; }

    void fill(std::span<const std::size_t> indices, Tensor& batch,
              std::vector<int>& labels) const override {
        const int B = static_cast<int>(indices.size());
        batch = Tensor({B, 1, 1, 40, 40});
        labels.resize(indices.size());
        for (int i = 0; i < B; ++i) {
            Rng rng = Rng::derive(seed_, "sample_" + std::to_string(indices[i]));
            const int label = static_cast<int>(indices[i] % 2);
            labels[i] = label;
            float* img = batch.data() + static_cast<std::size_t>(i) * 1600;
            for (int p = 0; p < 1600; ++p) img[p] = 0.2f * rng.normal_f();
            const float level = label == 1 ? static_cast<float>(separation_) : 0.0f;
            for (int r = 10; r < 30; ++r)
                for (int c = 10; c < 30; ++c) img[r * 40 + c] += level;
        }
    }

private:
    std::size_t n_;
    double separation_;
    std::uint64_t seed_;
};

ConfusionMatrix cm_from_rates(double tpr, double tnr, long pos, long neg) {
    ConfusionMatrix cm;
    cm.tp = std::lround(tpr * pos);
    cm.fn = pos - cm.tp;
    cm.tn = std::lround(tnr * neg);
    cm.fp = neg - cm.tn;
    return cm;
}

}  // namespace

TEST_CASE("cosine schedule hits the range endpoints") {
    TrainConfig cfg;
    cfg.epochs = 20;
    CHECK(cosine_lr(0, cfg) == doctest::Approx(0.01));
    CHECK(cosine_lr(20, cfg) == doctest::Approx(0.001));
    CHECK(cosine_lr(10, cfg) == doctest::Approx(0.0055));
    for (int e = 1; e <= 20; ++e) CHECK(cosine_lr(e, cfg) < cosine_lr(e - 1, cfg));

    TrainConfig bad;
    bad.lr_min = 0.01;
    bad.lr_max = 0.001;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("published confusion rates reproduce the reported metrics") {
    // decision-level tri-modal system, degraded test split
    const ConfusionMatrix late = cm_from_rates(0.7548, 0.9688, 840, 480);
    const MetricsReport a = metrics_from_confusion(late);
    CHECK(a.accuracy == doctest::Approx(83.26).epsilon(0.0006));
    CHECK(a.precision == doctest::Approx(97.69).epsilon(0.0006));
    CHECK(a.recall == doctest::Approx(75.48).epsilon(0.0007));
    CHECK(a.f1 == doctest::Approx(85.16).epsilon(0.0006));
    CHECK(a.macro_f1 == doctest::Approx(82.98).epsilon(0.0006));

    // gated system on the same split
    const ConfusionMatrix gmu = cm_from_rates(1.0, 0.327, 840, 480);
    const MetricsReport b = metrics_from_confusion(gmu);
    CHECK(b.accuracy == doctest::Approx(75.53).epsilon(0.0007));
    CHECK(b.precision == doctest::Approx(72.23).epsilon(0.0007));
    CHECK(b.recall == doctest::Approx(100.0));
    CHECK(b.f1 == doctest::Approx(83.87).epsilon(0.0006));
    CHECK(b.macro_f1 == doctest::Approx(66.58).epsilon(0.001));
}

TEST_CASE("degenerate ratios return zero with the flag set") {
    ConfusionMatrix cm;
    cm.tn = 10;
    cm.fn = 5;
    const MetricsReport r = metrics_from_confusion(cm);
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.degenerate);
    CHECK_THROWS(metrics_from_confusion(ConfusionMatrix{}));
}

TEST_CASE("constant-positive classifier hits the class base rate") {
    std::vector<SampleOutcome> outcomes;
    for (int i = 0; i < 840; ++i)
        outcomes.push_back({PresenceFlag(1), PresenceFlag(1), {}});
    for (int i = 0; i < 480; ++i)
        outcomes.push_back({PresenceFlag(0), PresenceFlag(1), {}});
    const MetricsReport r = evaluate_outcomes(outcomes);
    CHECK(r.accuracy == doctest::Approx(63.64).epsilon(0.0002));
    CHECK(r.recall == doctest::Approx(100.0));
    CHECK(r.f1 == doctest::Approx(77.78).epsilon(0.0002));
    CHECK(r.macro_f1 == doctest::Approx(38.89).epsilon(0.0002));
}

TEST_CASE("perfect classifier scores 100 with a diagonal confusion") {
    std::vector<SampleOutcome> outcomes;
    for (int i = 0; i < 50; ++i)
        outcomes.push_back({PresenceFlag(i % 2), PresenceFlag(i % 2), {}});
    ConfusionMatrix cm;
    const MetricsReport r = evaluate_outcomes(outcomes, &cm);
    CHECK(r.accuracy == doctest::Approx(100.0));
    CHECK(cm.fp == 0);
    CHECK(cm.fn == 0);
}

TEST_CASE("condition slices partition the overall confusion") {
    Rng rng(3);
    std::vector<SampleOutcome> outcomes;
    for (int i = 0; i < 200; ++i) {
        SampleOutcome o;
        o.truth = PresenceFlag(rng.bernoulli(0.6) ? 1 : 0);
        o.predicted = PresenceFlag(rng.bernoulli(0.5) ? 1 : 0);
        o.tags.lighting = rng.bernoulli(0.5) ? Lighting::daylight : Lighting::sunset;
        o.tags.location = rng.bernoulli(0.3) ? Location::urban : Location::non_urban;
        outcomes.push_back(o);
    }
    ConfusionMatrix cm;
    const MetricsReport r = evaluate_outcomes(outcomes, &cm);

    ConfusionMatrix lighting_sum, location_sum;
    for (const auto& s : r.slices) {
        if (s.key.rfind("lighting=", 0) == 0) lighting_sum += s.cm;
        if (s.key.rfind("location=", 0) == 0) location_sum += s.cm;
    }
    CHECK(lighting_sum.tp == cm.tp);
    CHECK(lighting_sum.fp == cm.fp);
    CHECK(lighting_sum.tn == cm.tn);
    CHECK(lighting_sum.fn == cm.fn);
    CHECK(location_sum.total() == cm.total());
}

TEST_CASE("reports serialize to text, json and csv") {
    const ConfusionMatrix cm = cm_from_rates(0.9, 0.8, 100, 50);
    MetricsReport r = metrics_from_confusion(cm);
    r.slices.push_back({"lighting=daylight", cm, 1, 2, 3, 4, 5});
    const std::string text = report_to_text(r, "demo");
    CHECK(text.find("[demo]") != std::string::npos);
    CHECK(text.find("accuracy:") != std::string::npos);
    CHECK(text.find("lighting=daylight") != std::string::npos);

    const std::string json = report_to_json(r, "demo");
    CHECK(json.find("\"accuracy\"") != std::string::npos);

    const std::string csv = confusion_to_csv(cm);
    CHECK(csv.find("drone," + std::to_string(cm.tp)) != std::string::npos);
}

TEST_CASE("training reaches high accuracy on separable data") {
    auto model = nn::build_audio_lenet(0.25);
    model.init_params(60);
    SyntheticSource train_src(200, 1.0, 61);
    SyntheticSource val_src(60, 1.0, 62);

    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch_size = 16;
    cfg.seed = 63;
    const TrainHistory h = train_unimodal(model, train_src, &val_src, cfg);
    REQUIRE(h.epochs.size() == 20);
    CHECK(h.epochs.back().train_loss <= h.epochs.front().train_loss);
    CHECK(h.epochs.back().val_accuracy >= 0.90);
    CHECK(h.epochs.front().lr == doctest::Approx(0.01));
}

TEST_CASE("fixed seeds give bit-identical weights on one thread") {
#ifdef _OPENMP
    const int prev = omp_get_max_threads();
    omp_set_num_threads(1);
#endif
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 8;
    cfg.seed = 64;
    SyntheticSource src(40, 1.0, 65);

    auto run = [&] {
        auto model = nn::build_audio_lenet(0.25);
        model.init_params(66);
        train_unimodal(model, src, nullptr, cfg);
        std::vector<float> flat;
        for (const auto& p : model.parameters(true))
            flat.insert(flat.end(), p.value->data(),
                        p.value->data() + p.value->size());
        return flat;
    };
    const auto a = run();
    const auto b = run();
#ifdef _OPENMP
    omp_set_num_threads(prev);
#endif
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("training rejects an empty split") {
    auto model = nn::build_audio_lenet(0.25);
    model.init_params(70);
    SyntheticSource empty(0, 1.0, 71);
    CHECK_THROWS(train_unimodal(model, empty, nullptr, TrainConfig{}));
}

TEST_SUITE_END();
