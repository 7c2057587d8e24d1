// trident: synthesize, preprocess, train, fuse, evaluate and benchmark the
// tri-modal drone detection pipeline.

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "trident/augmentation.hpp"
#include "trident/core_types.hpp"
#include "trident/evaluation.hpp"
#include "trident/fusion.hpp"
#include "trident/latency_bench.hpp"
#include "trident/nn/weights_io.hpp"
#include "trident/pipeline.hpp"
#include "trident/rf_features.hpp"
#include "trident/run_config.hpp"
#include "trident/synth_data.hpp"
#include "trident/training.hpp"
#include "trident/video_features.hpp"

namespace fs = std::filesystem;
using namespace trident;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string data_dir;
    std::uint64_t seed = 7;
    int threads = 0;

    config::RunConfig cfg;

    fs::path data_root() const {
        if (!data_dir.empty()) return data_dir;
        if (const char* env = std::getenv("TRIDENT_DATA_DIR")) return env;
        return cfg.get("data", "root", "./data");
    }
};

double rf_rate_for_manifest(const GlobalOpts& g, const fs::path& manifest) {
    if (g.cfg.has("data", "rf_sample_rate"))
        return g.cfg.get_double("data", "rf_sample_rate", 1e6);
    const fs::path sidecar = manifest.parent_path() / "dataset.cfg";
    if (fs::exists(sidecar)) {
        const auto meta = config::RunConfig::parse_file(sidecar);
        if (meta.has("data", "rf_sample_rate"))
            return meta.get_double("data", "rf_sample_rate", 1e6);
    }
    return 1e6;
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct LoadedSystem {
    std::vector<std::unique_ptr<nn::Classifier>> owned;
    std::vector<pipeline::Modality> modalities;
    fusion::FusionWeights late_w;
    fusion::GmuParams gmu_p;
    pipeline::SystemSpec spec;
};

LoadedSystem load_system(const std::string& modalities_csv,
                         const std::string& models_csv,
                         const std::string& fusion_type,
                         const std::string& fusion_weights) {
    LoadedSystem sys;
    const auto mods = split_csv(modalities_csv);
    const auto files = split_csv(models_csv);
    if (mods.size() != files.size())
        throw std::runtime_error("need one weight file per modality");
    for (std::size_t i = 0; i < mods.size(); ++i) {
        sys.modalities.push_back(pipeline::modality_from_string(mods[i]));
        sys.owned.push_back(std::make_unique<nn::Classifier>(
            nn::load_classifier(files[i])));
        sys.spec.models.push_back(sys.owned.back().get());
    }
    sys.spec.modalities = sys.modalities;
    if (fusion_type == "none") {
        sys.spec.fusion = pipeline::SystemSpec::Fusion::none;
    } else if (fusion_type == "late") {
        sys.spec.fusion = pipeline::SystemSpec::Fusion::late;
        sys.late_w = fusion::load_late_weights(fusion_weights);
        sys.spec.late_weights = &sys.late_w;
    } else if (fusion_type == "gmu") {
        sys.spec.fusion = pipeline::SystemSpec::Fusion::gmu;
        sys.gmu_p = fusion::load_gmu_params(fusion_weights);
        sys.spec.gmu_params = &sys.gmu_p;
    } else {
        throw std::runtime_error("unknown fusion type: " + fusion_type);
    }
    sys.spec.validate();
    return sys;
}

int run_synth(const GlobalOpts& g, int files, double difficulty, double balance,
              double rf_rate, const std::string& out) {
    synth::SynthConfig cfg;
    cfg.n_files = files;
    cfg.difficulty = difficulty;
    cfg.class_balance = balance;
    cfg.rf_sample_rate = rf_rate;
    cfg.p_daylight = g.cfg.get_double("data", "p_daylight", cfg.p_daylight);
    cfg.p_urban = g.cfg.get_double("data", "p_urban", cfg.p_urban);
    cfg.p_los = g.cfg.get_double("data", "p_los", cfg.p_los);
    cfg.frame_px = static_cast<int>(g.cfg.get_int("data", "frame_px", cfg.frame_px));
    cfg.seed = g.seed;
    const fs::path out_dir = out.empty() ? g.data_root() : fs::path(out);
    const fs::path manifest = synth::generate_dataset(cfg, out_dir);
    std::cout << "wrote " << manifest.string() << "\n";
    return 0;
}

int run_preprocess(const GlobalOpts& g, const std::string& manifest,
                   const std::string& split, const std::string& out) {
    const auto entries = load_manifest(manifest);
    std::vector<ManifestEntry> subset;
    if (split == "all") {
        subset = entries;
    } else {
        Split s = Split::train;
        if (split == "val") s = Split::val;
        else if (split == "test") s = Split::test;
        else if (split != "train")
            throw std::runtime_error("unknown split: " + split);
        subset = pipeline::entries_of_split(entries, s);
    }
    const double rf_rate = rf_rate_for_manifest(g, manifest);
    const auto cache = pipeline::FeatureCache::build(subset, rf_rate);
    cache.save(out);
    std::cout << "cached " << cache.size() << " samples to " << out << "\n";
    return 0;
}

int run_train(const GlobalOpts& g, const std::string& manifest,
              const std::string& modality, const std::string& arch,
              double shrink, int epochs, int batch, const std::string& out) {
    const auto entries = load_manifest(manifest);
    const double rf_rate = rf_rate_for_manifest(g, manifest);
    const auto m = pipeline::modality_from_string(modality);
    const int n_frames = m == pipeline::Modality::video ? 7 : 1;
    nn::Classifier model = nn::build_classifier(
        nn::architecture_from_string(arch), n_frames, shrink);
    model.init_params(g.seed);

    const auto cache = pipeline::FeatureCache::build(entries, rf_rate);
    std::vector<std::size_t> train_idx, val_idx;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].split == Split::train) train_idx.push_back(i);
        if (entries[i].split == Split::val) val_idx.push_back(i);
    }
    pipeline::CachedBatchSource train_src(cache, m, train_idx);
    pipeline::CachedBatchSource val_src(cache, m, val_idx);

    train::TrainConfig tc;
    tc.epochs = epochs;
    tc.batch_size = batch;
    tc.lr_min = g.cfg.get_double("train", "lr_min", tc.lr_min);
    tc.lr_max = g.cfg.get_double("train", "lr_max", tc.lr_max);
    tc.seed = g.seed;
    const auto history = train::train_unimodal(
        model, train_src, val_idx.empty() ? nullptr : &val_src, tc);
    for (std::size_t e = 0; e < history.epochs.size(); ++e) {
        std::cout << "epoch " << e << ": loss "
                  << history.epochs[e].train_loss << ", val acc "
                  << history.epochs[e].val_accuracy << "\n";
    }
    nn::save_classifier(out, model);
    std::cout << "wrote " << out << "\n";
    return 0;
}

int run_fuse(const GlobalOpts& g, const std::string& manifest,
             const std::string& type, const std::string& modalities_csv,
             const std::string& models_csv, int epochs, double lr, int hidden,
             const std::string& out) {
    const auto entries = load_manifest(manifest);
    const double rf_rate = rf_rate_for_manifest(g, manifest);
    // Fit fusion on the held-out validation split: the frozen extractors
    // overfit their own training data, which would mask how reliable each
    // modality actually is.
    const auto fit_entries = pipeline::entries_of_split(entries, Split::val);
    const auto cache = pipeline::FeatureCache::build(fit_entries, rf_rate);
    std::vector<std::size_t> idx(cache.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;

    const auto mods_s = split_csv(modalities_csv);
    const auto files = split_csv(models_csv);
    if (mods_s.size() != files.size())
        throw std::runtime_error("need one weight file per modality");
    std::vector<pipeline::Modality> mods;
    std::vector<std::unique_ptr<nn::Classifier>> owned;
    std::vector<nn::Classifier*> models;
    for (std::size_t i = 0; i < mods_s.size(); ++i) {
        mods.push_back(pipeline::modality_from_string(mods_s[i]));
        owned.push_back(std::make_unique<nn::Classifier>(
            nn::load_classifier(files[i])));
        models.push_back(owned.back().get());
    }

    if (type == "late") {
        const auto w = pipeline::train_late_fusion(models, mods, cache, idx,
                                                   epochs, lr);
        fusion::save_late_weights(out, w);
    } else if (type == "gmu") {
        auto r = pipeline::train_gmu_fusion(models, mods, cache, idx, hidden,
                                            epochs, lr, g.seed);
        fusion::save_gmu_params(out, r.params);
    } else {
        throw std::runtime_error("unknown fusion type: " + type);
    }
    std::cout << "wrote " << out << "\n";
    return 0;
}

augment::AugmentationConfig resolve_scenario(
    const GlobalOpts& g, const std::string& scenario,
    const std::string& augment_config, const std::string& manifest,
    double rf_rate, const std::string& report_prefix) {
    if (!augment_config.empty()) return augment::load_config(augment_config);
    // Calibrate on train-split probes and keep the resolved config beside
    // the report.
    const auto entries = load_manifest(manifest);
    const auto train_entries = pipeline::entries_of_split(entries, Split::train);
    const long n_probes = std::max<long>(20, g.cfg.get_int("augment", "probes", 24));
    if (static_cast<long>(train_entries.size()) < n_probes)
        throw std::runtime_error("not enough train samples to calibrate (need " +
                                 std::to_string(n_probes) + ")");
    std::vector<MultiModalSample> probes;
    for (long i = 0; i < n_probes; ++i)
        probes.push_back(pipeline::load_sample(train_entries[i], rf_rate).sample);
    const auto cfg = augment::calibrate_scenario(
        augment::preset_by_name(scenario), probes, g.seed);
    if (!report_prefix.empty())
        augment::save_config(report_prefix + ".augment.cfg", cfg);
    return cfg;
}

int run_evaluate(const GlobalOpts& g, const std::string& manifest,
                 const std::string& modalities_csv, const std::string& models_csv,
                 const std::string& fusion_type, const std::string& fusion_weights,
                 const std::string& scenario, const std::string& augment_config,
                 const std::string& report_prefix) {
    const double rf_rate = rf_rate_for_manifest(g, manifest);
    LoadedSystem sys = load_system(modalities_csv, models_csv, fusion_type,
                                   fusion_weights);
    const auto entries = load_manifest(manifest);
    const auto test_entries = pipeline::entries_of_split(entries, Split::test);

    std::optional<augment::AugmentationConfig> aug;
    if (scenario != "none")
        aug = resolve_scenario(g, scenario, augment_config, manifest, rf_rate,
                               report_prefix);

    eval::ConfusionMatrix cm;
    const auto report = pipeline::evaluate_system(sys.spec, test_entries, aug,
                                                  rf_rate, &cm);
    const std::string title = sys.spec.describe() +
                              (scenario != "none" ? " / " + scenario : "");
    const std::string text = eval::report_to_text(report, title);
    std::cout << text;
    if (!report_prefix.empty()) {
        eval::write_text_file(report_prefix + ".txt", text);
        eval::write_text_file(report_prefix + ".json",
                              eval::report_to_json(report, title));
        eval::write_text_file(report_prefix + ".csv", eval::confusion_to_csv(cm));
        std::cout << "wrote " << report_prefix << ".{txt,json,csv}\n";
    }
    return 0;
}

int run_calibrate(const GlobalOpts& g, const std::string& manifest,
                  const std::string& preset, int probes, const std::string& out) {
    const double rf_rate = rf_rate_for_manifest(g, manifest);
    const auto entries = load_manifest(manifest);
    const auto train_entries = pipeline::entries_of_split(entries, Split::train);
    if (static_cast<int>(train_entries.size()) < probes)
        throw std::runtime_error("not enough train samples to calibrate");
    std::vector<MultiModalSample> samples;
    for (int i = 0; i < probes; ++i)
        samples.push_back(pipeline::load_sample(train_entries[i], rf_rate).sample);
    const auto cfg = augment::calibrate_scenario(augment::preset_by_name(preset),
                                                 samples, g.seed);
    augment::save_config(out, cfg);
    std::cout << "achieved mcd " << cfg.achieved_mcd_db << " dB, ssim "
              << cfg.achieved_ssim << "; wrote " << out << "\n";
    return 0;
}

int run_benchmark(const GlobalOpts& g, const std::string& manifest,
                  const std::string& modalities_csv, const std::string& models_csv,
                  const std::string& fusion_type, const std::string& fusion_weights,
                  int iterations, int warmup, const std::string& report_prefix) {
    const double rf_rate = rf_rate_for_manifest(g, manifest);
    LoadedSystem sys = load_system(modalities_csv, models_csv, fusion_type,
                                   fusion_weights);
    const auto entries = load_manifest(manifest);
    const auto test_entries = pipeline::entries_of_split(entries, Split::test);
    if (test_entries.empty()) throw std::runtime_error("empty test split");
    const long n_samples =
        std::min<long>(g.cfg.get_int("bench", "samples", 8),
                       static_cast<long>(test_entries.size()));

    // Stage state shared across the per-iteration callbacks.
    struct State {
        AudioSegment audio;
        MfccGrid mfcc;
        FrameStack video;
        rf::IqSegment iq;
        RfSpectrogram rf;
        std::vector<fusion::Prediction> preds;
        std::vector<fusion::FeatureVec> feats;
    } st;

    auto entry_at = [&](int it) -> const ManifestEntry& {
        return test_entries[static_cast<std::size_t>(it) % n_samples];
    };

    std::vector<bench::Stage> stages;
    stages.push_back({"audio_features", [&](int it) {
        st.audio = audio::load_audio_segment(entry_at(it).audio_path);
        st.mfcc = audio::mfcc_extract(st.audio, {});
    }});
    stages.push_back({"video_features", [&](int it) {
        st.video = video::load_frame_stack(entry_at(it).frames_dir, 0);
    }});
    stages.push_back({"rf_features", [&](int it) {
        auto segs = rf::load_iq(entry_at(it).iq_path, rf_rate);
        st.iq = std::move(segs.front());
        st.rf = rf::stft_spectrogram(st.iq);
    }});
    stages.push_back({"model_forwards", [&](int) {
        st.preds.clear();
        st.feats.clear();
        MultiModalSample s;
        s.audio = st.audio;
        s.video = st.video;
        s.rf = st.rf;
        for (std::size_t m = 0; m < sys.spec.modalities.size(); ++m) {
            Tensor input;
            switch (sys.spec.modalities[m]) {
                case pipeline::Modality::audio:
                    input = st.mfcc.values.reshaped({1, 1, 1, 40, 40});
                    break;
                case pipeline::Modality::video: {
                    input = Tensor({1, 3, 7, 112, 112});
                    const float* src = st.video.values.data();
                    for (int f = 0; f < 7; ++f)
                        for (int ch = 0; ch < 3; ++ch)
                            std::copy_n(src + (static_cast<std::size_t>(f) * 3 + ch) *
                                                  (112 * 112),
                                        112 * 112,
                                        input.data() +
                                            (static_cast<std::size_t>(ch) * 7 + f) *
                                                (112 * 112));
                    break;
                }
                case pipeline::Modality::rf:
                    input = st.rf.values.reshaped({1, 3, 1, 112, 112});
                    break;
            }
            auto out = sys.spec.models[m]->forward(input, false);
            st.preds.push_back({out.probs[0], out.probs[1]});
            st.feats.emplace_back(out.features.data(),
                                  out.features.data() + out.features.size());
        }
    }});
    stages.push_back({"fusion", [&](int) {
        switch (sys.spec.fusion) {
            case pipeline::SystemSpec::Fusion::none:
                break;
            case pipeline::SystemSpec::Fusion::late:
                fusion::late_fuse(st.preds, *sys.spec.late_weights);
                break;
            case pipeline::SystemSpec::Fusion::gmu:
                fusion::gmu_forward(st.feats, *sys.spec.gmu_params);
                break;
        }
    }});

    const auto report = bench::benchmark_stages(stages, iterations, warmup);
    const std::string text = bench::latency_to_text(report);
    std::cout << text;
    if (!report_prefix.empty()) {
        eval::write_text_file(report_prefix + ".txt", text);
        eval::write_text_file(report_prefix + ".json",
                              bench::latency_to_json(report));
        std::cout << "wrote " << report_prefix << ".{txt,json}\n";
    }
    return 0;
}

int run_report(const std::string& json_path) {
    std::ifstream in(json_path);
    if (!in) throw std::runtime_error("cannot open report: " + json_path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto j = nlohmann::json::parse(buf.str());
    std::cout << "[" << j.value("title", "report") << "]\n";
    for (const auto& key : {"accuracy", "precision", "recall", "f1", "macro_f1"}) {
        if (j.contains(key))
            std::cout << key << ": " << j[key].get<double>() << "\n";
    }
    if (j.contains("slices")) {
        for (const auto& [name, s] : j["slices"].items()) {
            std::cout << "\n[" << name << "]\n";
            for (const auto& key : {"accuracy", "precision", "recall", "f1"})
                std::cout << key << ": " << s[key].get<double>() << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tri-modal drone detection pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--config", g.config_path, "run configuration file");
    app.add_option("--seed", g.seed, "global random seed");
    app.add_option("--threads", g.threads, "worker thread count (0 = default)");
    app.add_option("--data-dir", g.data_dir,
                   "data root (default: $TRIDENT_DATA_DIR or ./data)");

    // synth-data
    auto* synth_cmd = app.add_subcommand("synth-data", "generate a synthetic dataset");
    int files = 10;
    double difficulty = 0.0, balance = 0.5, rf_rate_opt = 0.0;
    std::string out_dir;
    synth_cmd->add_option("--files", files, "number of 10 s recordings");
    synth_cmd->add_option("--difficulty", difficulty, "0 = trivially separable");
    synth_cmd->add_option("--balance", balance, "fraction of drone recordings");
    synth_cmd->add_option("--rf-rate", rf_rate_opt, "synthetic I/Q sample rate");
    synth_cmd->add_option("--out", out_dir, "output directory");

    // preprocess
    auto* pre_cmd = app.add_subcommand("preprocess", "extract model-ready features");
    std::string manifest, split = "all", cache_out = "features.cache";
    pre_cmd->add_option("--manifest", manifest, "dataset manifest")->required();
    pre_cmd->add_option("--split", split, "all|train|val|test");
    pre_cmd->add_option("--out", cache_out, "cache file");

    // train
    auto* train_cmd = app.add_subcommand("train", "train one unimodal model");
    std::string modality = "audio", arch = "lenet", weights_out = "model.w";
    double shrink = 1.0;
    int epochs = 20, batch = 16;
    train_cmd->add_option("--manifest", manifest, "dataset manifest")->required();
    train_cmd->add_option("--modality", modality, "audio|video|rf");
    train_cmd->add_option("--arch", arch, "lenet|vgg19|resnet10|mobilenet");
    train_cmd->add_option("--shrink", shrink, "channel width factor");
    train_cmd->add_option("--epochs", epochs, "training epochs");
    train_cmd->add_option("--batch-size", batch, "minibatch size");
    train_cmd->add_option("--out", weights_out, "weight file");

    // fuse
    auto* fuse_cmd = app.add_subcommand("fuse", "fit fusion over frozen models");
    std::string fuse_type = "late", modalities_csv = "audio,video,rf",
                models_csv, fusion_out = "fusion.w";
    int fuse_epochs = 200, gmu_hidden = 32;
    double fuse_lr = 0.05;
    fuse_cmd->add_option("--manifest", manifest, "dataset manifest")->required();
    fuse_cmd->add_option("--type", fuse_type, "late|gmu");
    fuse_cmd->add_option("--modalities", modalities_csv, "comma list");
    fuse_cmd->add_option("--models", models_csv, "comma list of weight files")
        ->required();
    fuse_cmd->add_option("--epochs", fuse_epochs, "fusion training epochs");
    fuse_cmd->add_option("--lr", fuse_lr, "fusion learning rate");
    fuse_cmd->add_option("--gmu-hidden", gmu_hidden, "gmu hidden width");
    fuse_cmd->add_option("--out", fusion_out, "fusion weight file");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "run a system on the test split");
    std::string fusion_weights, scenario = "none", augment_cfg, report_prefix;
    eval_cmd->add_option("--manifest", manifest, "dataset manifest")->required();
    eval_cmd->add_option("--modalities", modalities_csv, "comma list");
    eval_cmd->add_option("--models", models_csv, "comma list of weight files")
        ->required();
    eval_cmd->add_option("--fusion", fuse_type, "none|late|gmu");
    eval_cmd->add_option("--fusion-weights", fusion_weights, "fusion weight file");
    eval_cmd->add_option("--scenario", scenario, "none|low_noise|high_noise");
    eval_cmd->add_option("--augment-config", augment_cfg,
                         "resolved augmentation config (else auto-calibrates)");
    eval_cmd->add_option("--report", report_prefix, "report path prefix");

    // augment-calibrate
    auto* cal_cmd = app.add_subcommand("augment-calibrate",
                                       "calibrate a degradation scenario");
    std::string preset = "high_noise", cal_out = "augment.cfg";
    int probes = 24;
    cal_cmd->add_option("--manifest", manifest, "dataset manifest")->required();
    cal_cmd->add_option("--preset", preset, "low_noise|high_noise");
    cal_cmd->add_option("--probes", probes, "probe sample count (>= 20)");
    cal_cmd->add_option("--out", cal_out, "resolved config path");

    // benchmark
    auto* bench_cmd = app.add_subcommand("benchmark", "wall-clock latency per stage");
    int iterations = 50, warmup = 5;
    bench_cmd->add_option("--manifest", manifest, "dataset manifest")->required();
    bench_cmd->add_option("--modalities", modalities_csv, "comma list");
    bench_cmd->add_option("--models", models_csv, "comma list of weight files")
        ->required();
    bench_cmd->add_option("--fusion", fuse_type, "none|late|gmu");
    bench_cmd->add_option("--fusion-weights", fusion_weights, "fusion weight file");
    bench_cmd->add_option("--iterations", iterations, "timed iterations (>= 30)");
    bench_cmd->add_option("--warmup", warmup, "warmup passes (>= 5)");
    bench_cmd->add_option("--report", report_prefix, "report path prefix");

    // report
    auto* report_cmd = app.add_subcommand("report", "render a JSON report as text");
    std::string json_path;
    report_cmd->add_option("--json", json_path, "metrics JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (!g.config_path.empty())
            g.cfg = config::RunConfig::parse_file(g.config_path);
#ifdef _OPENMP
        if (g.threads > 0) omp_set_num_threads(g.threads);
#endif
        const double rf_rate =
            rf_rate_opt > 0.0 ? rf_rate_opt
                              : g.cfg.get_double("data", "rf_sample_rate", 1e6);
        if (rf_rate_opt > 0.0)
            g.cfg.set("data", "rf_sample_rate", std::to_string(rf_rate_opt));

        if (synth_cmd->parsed())
            return run_synth(g, files, difficulty, balance, rf_rate, out_dir);
        if (pre_cmd->parsed()) return run_preprocess(g, manifest, split, cache_out);
        if (train_cmd->parsed())
            return run_train(g, manifest, modality, arch, shrink, epochs, batch,
                             weights_out);
        if (fuse_cmd->parsed())
            return run_fuse(g, manifest, fuse_type, modalities_csv, models_csv,
                            fuse_epochs, fuse_lr, gmu_hidden, fusion_out);
        if (eval_cmd->parsed())
            return run_evaluate(g, manifest, modalities_csv, models_csv, fuse_type,
                                fusion_weights, scenario, augment_cfg,
                                report_prefix);
        if (cal_cmd->parsed())
            return run_calibrate(g, manifest, preset, probes, cal_out);
        if (bench_cmd->parsed())
            return run_benchmark(g, manifest, modalities_csv, models_csv,
                                 fuse_type, fusion_weights, iterations, warmup,
                                 report_prefix);
        if (report_cmd->parsed()) return run_report(json_path);
        std::cerr << "no subcommand given\n" << app.help() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
