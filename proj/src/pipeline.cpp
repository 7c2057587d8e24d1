#include "trident/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "trident/audio_features.hpp"
#include "trident/video_features.hpp"

namespace trident::pipeline {

std::string to_string(Modality m) {
    switch (m) {
        case Modality::audio: return "audio";
        case Modality::video: return "video";
        default: return "rf";
    }
}

Modality modality_from_string(const std::string& s) {
    if (s == "audio") return Modality::audio;
    if (s == "video" || s == "visual") return Modality::video;
    if (s == "rf") return Modality::rf;
    throw std::invalid_argument("unknown modality: " + s);
}

LoadedSample load_sample(const ManifestEntry& e, double rf_sample_rate) {
    LoadedSample s;
    s.sample_id = e.sample_id;
    s.sample.label = e.label;
    s.sample.tags = e.tags;
    s.sample.audio = audio::load_audio_segment(e.audio_path);
    s.sample.video = video::load_frame_stack(e.frames_dir, 0);
    auto segments = rf::load_iq(e.iq_path, rf_sample_rate);
    if (segments.empty())
        throw std::runtime_error("iq file holds no full segment: " +
                                 e.iq_path.string());
    s.iq = std::move(segments.front());
    s.sample.rf = rf::stft_spectrogram(s.iq);
    return s;
}

namespace {

constexpr std::size_t kVideoBytes = 7ull * 3 * 112 * 112;
constexpr std::size_t kRfBytes = 3ull * 112 * 112;
constexpr std::size_t kMfccFloats = 40ull * 40;

std::vector<std::uint8_t> quantize(const Tensor& t) {
    std::vector<std::uint8_t> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        out[i] = static_cast<std::uint8_t>(
            std::lround(std::clamp(t[i], 0.0f, 1.0f) * 255.0f));
    return out;
}

}  // namespace

FeatureCache FeatureCache::build(std::span<const ManifestEntry> entries,
                                 double rf_sample_rate) {
    FeatureCache c;
    const std::size_t n = entries.size();
    c.ids_.resize(n);
    c.labels_.resize(n);
    c.tags_.resize(n);
    c.mfcc_.resize(n);
    c.video_.resize(n);
    c.rf_.resize(n);
    std::vector<std::string> failures(n);

#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(n); ++i) {
        try {
            const ManifestEntry& e = entries[i];
            LoadedSample s = load_sample(e, rf_sample_rate);
            const MfccGrid grid = audio::mfcc_extract(s.sample.audio, {});
            c.ids_[i] = e.sample_id;
            c.labels_[i] = e.label.value;
            c.tags_[i] = e.tags;
            c.mfcc_[i].assign(grid.values.data(),
                              grid.values.data() + grid.values.size());
            c.video_[i] = quantize(s.sample.video.values);
            c.rf_[i] = quantize(s.sample.rf.values);
        } catch (const std::exception& ex) {
            failures[i] = ex.what();
        }
    }
    for (const auto& f : failures)
        if (!f.empty()) throw std::runtime_error("preprocess failed: " + f);
    return c;
}

void FeatureCache::fill(Modality m, std::span<const std::size_t> indices,
                        Tensor& batch, std::vector<int>& labels) const {
    const int B = static_cast<int>(indices.size());
    labels.resize(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i)
        labels[i] = labels_[indices[i]];

    switch (m) {
        case Modality::audio: {
            batch = Tensor({B, 1, 1, 40, 40});
            for (int i = 0; i < B; ++i)
                std::memcpy(batch.data() + static_cast<std::size_t>(i) * kMfccFloats,
                            mfcc_[indices[i]].data(), kMfccFloats * 4);
            break;
        }
        case Modality::video: {
            batch = Tensor({B, 3, 7, 112, 112});
            // cached layout is (frame, channel, h, w); models take
            // (channel, time, h, w)
#pragma omp parallel for schedule(static)
            for (int i = 0; i < B; ++i) {
                const auto& src = video_[indices[i]];
                float* dst = batch.data() + static_cast<std::size_t>(i) * kVideoBytes;
                for (int f = 0; f < 7; ++f)
                    for (int ch = 0; ch < 3; ++ch) {
                        const std::uint8_t* sp =
                            src.data() + (static_cast<std::size_t>(f) * 3 + ch) *
                                             (112 * 112);
                        float* dp = dst + (static_cast<std::size_t>(ch) * 7 + f) *
                                              (112 * 112);
                        for (int p = 0; p < 112 * 112; ++p)
                            dp[p] = sp[p] / 255.0f;
                    }
            }
            break;
        }
        case Modality::rf: {
            batch = Tensor({B, 3, 1, 112, 112});
#pragma omp parallel for schedule(static)
            for (int i = 0; i < B; ++i) {
                const auto& src = rf_[indices[i]];
                float* dst = batch.data() + static_cast<std::size_t>(i) * kRfBytes;
                for (std::size_t p = 0; p < kRfBytes; ++p)
                    dst[p] = src[p] / 255.0f;
            }
            break;
        }
    }
}

namespace {
constexpr char kCacheMagic[4] = {'T', 'R', 'I', 'C'};
}

void FeatureCache::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write cache: " + path.string());
    out.write(kCacheMagic, 4);
    const std::uint64_t n = ids_.size();
    out.write(reinterpret_cast<const char*>(&n), 8);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t len = static_cast<std::uint32_t>(ids_[i].size());
        out.write(reinterpret_cast<const char*>(&len), 4);
        out.write(ids_[i].data(), len);
        const std::uint8_t meta[4] = {
            static_cast<std::uint8_t>(labels_[i]),
            static_cast<std::uint8_t>(tags_[i].lighting == Lighting::sunset),
            static_cast<std::uint8_t>(tags_[i].location == Location::urban),
            static_cast<std::uint8_t>(tags_[i].los == Los::nlos)};
        out.write(reinterpret_cast<const char*>(meta), 4);
        out.write(reinterpret_cast<const char*>(mfcc_[i].data()),
                  kMfccFloats * 4);
        out.write(reinterpret_cast<const char*>(video_[i].data()), kVideoBytes);
        out.write(reinterpret_cast<const char*>(rf_[i].data()), kRfBytes);
    }
    if (!out) throw std::runtime_error("short cache write: " + path.string());
}

FeatureCache FeatureCache::load_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open cache: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kCacheMagic, 4) != 0)
        throw std::runtime_error("not a feature cache: " + path.string());
    std::uint64_t n = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    FeatureCache c;
    c.ids_.resize(n);
    c.labels_.resize(n);
    c.tags_.resize(n);
    c.mfcc_.resize(n);
    c.video_.resize(n);
    c.rf_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t len = 0;
        in.read(reinterpret_cast<char*>(&len), 4);
        if (!in || len > (1u << 16))
            throw std::runtime_error("corrupt cache: " + path.string());
        c.ids_[i].resize(len);
        in.read(c.ids_[i].data(), len);
        std::uint8_t meta[4];
        in.read(reinterpret_cast<char*>(meta), 4);
        c.labels_[i] = meta[0];
        c.tags_[i].lighting = meta[1] ? Lighting::sunset : Lighting::daylight;
        c.tags_[i].location = meta[2] ? Location::urban : Location::non_urban;
        c.tags_[i].los = meta[3] ? Los::nlos : Los::los;
        c.mfcc_[i].resize(kMfccFloats);
        in.read(reinterpret_cast<char*>(c.mfcc_[i].data()), kMfccFloats * 4);
        c.video_[i].resize(kVideoBytes);
        in.read(reinterpret_cast<char*>(c.video_[i].data()), kVideoBytes);
        c.rf_[i].resize(kRfBytes);
        in.read(reinterpret_cast<char*>(c.rf_[i].data()), kRfBytes);
        if (!in) throw std::runtime_error("truncated cache: " + path.string());
    }
    return c;
}

CachedBatchSource::CachedBatchSource(const FeatureCache& cache, Modality m,
                                     std::vector<std::size_t> subset)
    : cache_(cache), modality_(m), subset_(std::move(subset)) {}

void CachedBatchSource::fill(std::span<const std::size_t> indices,
                             Tensor& batch, std::vector<int>& labels) const {
    std::vector<std::size_t> mapped(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i)
        mapped[i] = subset_[indices[i]];
    cache_.fill(modality_, mapped, batch, labels);
}

std::vector<std::size_t> indices_of_split(std::span<const ManifestEntry> entries,
                                          Split split) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (entries[i].split == split) out.push_back(i);
    return out;
}

std::vector<ManifestEntry> entries_of_split(std::span<const ManifestEntry> entries,
                                            Split split) {
    std::vector<ManifestEntry> out;
    for (const auto& e : entries)
        if (e.split == split) out.push_back(e);
    return out;
}

void SystemSpec::validate() const {
    if (modalities.empty() || modalities.size() != models.size())
        throw std::invalid_argument("system needs one model per modality");
    for (auto* m : models)
        if (!m) throw std::invalid_argument("null model in system spec");
    if (fusion == Fusion::none && modalities.size() != 1)
        throw std::invalid_argument("unimodal system takes exactly one modality");
    if (fusion != Fusion::none && modalities.size() < 2)
        throw std::invalid_argument("fusion needs at least two modalities");
    if (fusion == Fusion::late && !late_weights)
        throw std::invalid_argument("late fusion needs weights");
    if (fusion == Fusion::gmu && !gmu_params)
        throw std::invalid_argument("gmu fusion needs parameters");
}

std::string SystemSpec::describe() const {
    std::string s;
    switch (fusion) {
        case Fusion::none: s = "unimodal"; break;
        case Fusion::late: s = "late"; break;
        case Fusion::gmu: s = "gmu"; break;
    }
    for (std::size_t i = 0; i < modalities.size(); ++i)
        s += (i ? "+" : ":") + to_string(modalities[i]);
    return s;
}

namespace {

Tensor sample_to_model_input(const MultiModalSample& s, Modality m,
                             const MfccGrid* mfcc) {
    switch (m) {
        case Modality::audio: {
            Tensor t({1, 1, 1, 40, 40});
            std::memcpy(t.data(), mfcc->values.data(), mfcc->values.size() * 4);
            return t;
        }
        case Modality::video: {
            Tensor t({1, 3, 7, 112, 112});
            const float* src = s.video.values.data();
            for (int f = 0; f < 7; ++f)
                for (int ch = 0; ch < 3; ++ch)
                    std::memcpy(t.data() + (static_cast<std::size_t>(ch) * 7 + f) *
                                               (112 * 112),
                                src + (static_cast<std::size_t>(f) * 3 + ch) *
                                          (112 * 112),
                                112 * 112 * 4);
            return t;
        }
        default: {
            Tensor t({1, 3, 1, 112, 112});
            std::memcpy(t.data(), s.rf.values.data(), s.rf.values.size() * 4);
            return t;
        }
    }
}

}  // namespace

std::vector<eval::MetricsReport> evaluate_systems(
    std::span<const SystemSpec> systems, std::span<const ManifestEntry> entries,
    const std::optional<augment::AugmentationConfig>& scenario,
    double rf_sample_rate) {
    for (const auto& s : systems) s.validate();
    if (entries.empty()) throw std::invalid_argument("empty evaluation split");

    // Distinct models across all systems, each run once per sample.
    std::vector<nn::Classifier*> models;
    std::vector<Modality> model_modality;
    auto model_slot = [&](nn::Classifier* m, Modality mod) {
        for (std::size_t i = 0; i < models.size(); ++i)
            if (models[i] == m) return i;
        models.push_back(m);
        model_modality.push_back(mod);
        return models.size() - 1;
    };
    std::vector<std::vector<std::size_t>> slots(systems.size());
    for (std::size_t s = 0; s < systems.size(); ++s)
        for (std::size_t m = 0; m < systems[s].models.size(); ++m)
            slots[s].push_back(
                model_slot(systems[s].models[m], systems[s].modalities[m]));

    const std::size_t n = entries.size();
    std::vector<std::vector<eval::SampleOutcome>> outcomes(
        systems.size(), std::vector<eval::SampleOutcome>(n));
    std::vector<std::string> failures(n);

    for (std::size_t i = 0; i < n; ++i) {
        try {
            LoadedSample loaded = load_sample(entries[i], rf_sample_rate);
            MultiModalSample* s = &loaded.sample;
            MultiModalSample augmented;
            if (scenario) {
                augmented = augment::augment_sample(loaded.sample, loaded.iq,
                                                    *scenario, loaded.sample_id);
                s = &augmented;
            }
            MfccGrid mfcc = audio::mfcc_extract(s->audio, {});

            std::vector<fusion::Prediction> preds(models.size());
            std::vector<fusion::FeatureVec> feats(models.size());
            for (std::size_t m = 0; m < models.size(); ++m) {
                const Tensor input =
                    sample_to_model_input(*s, model_modality[m], &mfcc);
                auto out = models[m]->forward(input, false);
                preds[m] = {out.probs[0], out.probs[1]};
                feats[m].assign(out.features.data(),
                                out.features.data() + out.features.size());
            }

            for (std::size_t sys = 0; sys < systems.size(); ++sys) {
                std::vector<fusion::Prediction> sys_preds;
                std::vector<fusion::FeatureVec> sys_feats;
                for (std::size_t slot : slots[sys]) {
                    sys_preds.push_back(preds[slot]);
                    sys_feats.push_back(feats[slot]);
                }
                fusion::Prediction final_pred{};
                switch (systems[sys].fusion) {
                    case SystemSpec::Fusion::none:
                        final_pred = sys_preds[0];
                        break;
                    case SystemSpec::Fusion::late:
                        final_pred =
                            fusion::late_fuse(sys_preds, *systems[sys].late_weights);
                        break;
                    case SystemSpec::Fusion::gmu:
                        final_pred =
                            fusion::gmu_forward(sys_feats, *systems[sys].gmu_params)
                                .prediction();
                        break;
                }
                outcomes[sys][i].truth = entries[i].label;
                outcomes[sys][i].predicted =
                    PresenceFlag(final_pred[1] >= final_pred[0] ? 1 : 0);
                outcomes[sys][i].tags = entries[i].tags;
            }
        } catch (const std::exception& ex) {
            failures[i] = ex.what();
        }
    }
    for (const auto& f : failures)
        if (!f.empty()) throw std::runtime_error("evaluation failed: " + f);

    std::vector<eval::MetricsReport> reports;
    reports.reserve(systems.size());
    for (std::size_t sys = 0; sys < systems.size(); ++sys)
        reports.push_back(eval::evaluate_outcomes(outcomes[sys]));
    return reports;
}

eval::MetricsReport evaluate_system(
    const SystemSpec& system, std::span<const ManifestEntry> entries,
    const std::optional<augment::AugmentationConfig>& scenario,
    double rf_sample_rate, eval::ConfusionMatrix* out_cm) {
    system.validate();
    if (entries.empty()) throw std::invalid_argument("empty evaluation split");

    const std::size_t n = entries.size();
    std::vector<eval::SampleOutcome> outcomes(n);
    std::vector<std::string> failures(n);

    for (std::size_t i = 0; i < n; ++i) {
        try {
            LoadedSample loaded = load_sample(entries[i], rf_sample_rate);
            MultiModalSample* s = &loaded.sample;
            MultiModalSample augmented;
            if (scenario) {
                augmented = augment::augment_sample(loaded.sample, loaded.iq,
                                                    *scenario, loaded.sample_id);
                s = &augmented;
            }
            MfccGrid mfcc = audio::mfcc_extract(s->audio, {});

            std::vector<fusion::Prediction> preds;
            std::vector<fusion::FeatureVec> feats;
            for (std::size_t m = 0; m < system.modalities.size(); ++m) {
                const Tensor input =
                    sample_to_model_input(*s, system.modalities[m], &mfcc);
                auto out = system.models[m]->forward(input, false);
                preds.push_back({out.probs[0], out.probs[1]});
                feats.emplace_back(out.features.data(),
                                   out.features.data() + out.features.size());
            }

            fusion::Prediction final_pred{};
            switch (system.fusion) {
                case SystemSpec::Fusion::none:
                    final_pred = preds[0];
                    break;
                case SystemSpec::Fusion::late:
                    final_pred = fusion::late_fuse(preds, *system.late_weights);
                    break;
                case SystemSpec::Fusion::gmu:
                    final_pred = fusion::gmu_forward(feats, *system.gmu_params)
                                     .prediction();
                    break;
            }
            outcomes[i].truth = entries[i].label;
            outcomes[i].predicted =
                PresenceFlag(final_pred[1] >= final_pred[0] ? 1 : 0);
            outcomes[i].tags = entries[i].tags;
        } catch (const std::exception& ex) {
            failures[i] = ex.what();
        }
    }
    for (const auto& f : failures)
        if (!f.empty()) throw std::runtime_error("evaluation failed: " + f);

    return eval::evaluate_outcomes(outcomes, out_cm);
}

UnimodalOutputs extract_outputs(nn::Classifier& model, const FeatureCache& cache,
                                Modality m, std::span<const std::size_t> subset,
                                int batch_size) {
    UnimodalOutputs out;
    Tensor batch;
    std::vector<int> labels;
    for (std::size_t off = 0; off < subset.size();
         off += static_cast<std::size_t>(batch_size)) {
        const std::size_t count =
            std::min<std::size_t>(batch_size, subset.size() - off);
        cache.fill(m, {subset.data() + off, count}, batch, labels);
        auto r = model.forward(batch, false);
        for (std::size_t i = 0; i < count; ++i) {
            out.predictions.push_back(
                {r.probs[i * 2], r.probs[i * 2 + 1]});
            const float* f =
                r.features.data() + i * static_cast<std::size_t>(model.feature_dim);
            out.features.emplace_back(f, f + model.feature_dim);
            out.labels.push_back(labels[i]);
        }
    }
    return out;
}

fusion::FusionWeights train_late_fusion(
    std::vector<nn::Classifier*> models, const std::vector<Modality>& mods,
    const FeatureCache& cache, std::span<const std::size_t> subset, int epochs,
    double lr) {
    if (models.size() != mods.size() || models.empty())
        throw std::invalid_argument("one model per modality required");
    std::vector<UnimodalOutputs> outs;
    for (std::size_t m = 0; m < models.size(); ++m)
        outs.push_back(extract_outputs(*models[m], cache, mods[m], subset));

    std::vector<std::vector<fusion::Prediction>> preds(subset.size());
    for (std::size_t s = 0; s < subset.size(); ++s)
        for (std::size_t m = 0; m < models.size(); ++m)
            preds[s].push_back(outs[m].predictions[s]);
    return fusion::train_late_weights(preds, outs[0].labels, epochs, lr);
}

fusion::GmuTrainResult train_gmu_fusion(
    std::vector<nn::Classifier*> models, const std::vector<Modality>& mods,
    const FeatureCache& cache, std::span<const std::size_t> subset,
    int hidden_dim, int epochs, double lr, std::uint64_t seed) {
    if (models.size() != mods.size() || models.empty())
        throw std::invalid_argument("one model per modality required");
    std::vector<UnimodalOutputs> outs;
    std::vector<int> dims;
    for (std::size_t m = 0; m < models.size(); ++m) {
        outs.push_back(extract_outputs(*models[m], cache, mods[m], subset));
        dims.push_back(models[m]->feature_dim);
    }
    std::vector<std::vector<fusion::FeatureVec>> feats(subset.size());
    for (std::size_t s = 0; s < subset.size(); ++s)
        for (std::size_t m = 0; m < models.size(); ++m)
            feats[s].push_back(outs[m].features[s]);
    fusion::GmuParams init = fusion::make_gmu_params(dims, hidden_dim, seed);
    return fusion::train_gmu(feats, outs[0].labels, std::move(init), epochs, lr);
}

}  // namespace trident::pipeline
