#include "trident/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fstream>

#include "trident/io/png_io.hpp"
#include "trident/io/wav_io.hpp"
#include "trident/rf_features.hpp"
#include "trident/run_config.hpp"
#include "trident/video_features.hpp"

namespace trident::synth {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kFps = 30;
constexpr int kClipSeconds = 10;
constexpr int kTimelineFrames = kFps * kClipSeconds;  // 300

struct RecordingPlan {
    int index = 0;
    bool drone = false;
    ConditionTags tags;
    std::vector<std::array<PresenceFlag, 7>> schedule;  // per segment
};

std::string zero_pad(int v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

// ------------------------------------------------------------- audio

std::vector<float> render_audio(const RecordingPlan& plan,
                                const SynthConfig& cfg, Rng& rng) {
    const int total = AudioSegment::kSampleRate * kClipSeconds;
    const double d = cfg.difficulty;
    std::vector<float> out(total, 0.0f);

    // Pink-ish background noise (three-pole filter over white noise).
    // Urban clutter only bites as difficulty rises, so the easy setting
    // stays cleanly separable.
    double noise_amp = 0.005 + 0.13 * d;
    if (plan.tags.location == Location::urban) noise_amp *= 1.0 + 0.5 * d;
    double b0 = 0, b1 = 0, b2 = 0;
    for (int i = 0; i < total; ++i) {
        const double w = rng.normal();
        b0 = 0.99765 * b0 + w * 0.0990460;
        b1 = 0.96300 * b1 + w * 0.2965164;
        b2 = 0.57000 * b2 + w * 1.0526913;
        out[i] = static_cast<float>(noise_amp * 0.18 * (b0 + b1 + b2 + w * 0.1848));
    }

    if (plan.drone) {
        // Harmonic comb with mild drift, gated by the presence schedule in
        // sevenths of each segment.
        const double f0 = rng.uniform(180.0, 220.0);
        const double comb_amp = 0.24 * (1.0 - 0.80 * d);
        double phases[6];
        for (auto& p : phases) p = rng.uniform(0.0, 2.0 * kPi);
        const int sub = AudioSegment::kLength / 7;  // 1575 samples
        for (int seg = 0; seg < cfg.segments_per_file; ++seg) {
            for (int j = 0; j < 7; ++j) {
                if (!plan.schedule[seg][j].present()) continue;
                const int begin = seg * AudioSegment::kLength + j * sub;
                const int end = j == 6 ? (seg + 1) * AudioSegment::kLength
                                       : begin + sub;
                for (int i = begin; i < end; ++i) {
                    const double t = static_cast<double>(i) / AudioSegment::kSampleRate;
                    const double f = f0 * (1.0 + 0.01 * std::sin(2.0 * kPi * 0.3 * t));
                    double v = 0.0;
                    for (int h = 1; h <= 6; ++h)
                        v += std::sin(2.0 * kPi * f * h * t + phases[h - 1]) / h;
                    out[i] += static_cast<float>(comb_amp * 0.5 * v);
                }
            }
        }
    } else {
        // Occasional tonal distractors; they grow with difficulty until they
        // rival the drone comb.
        const int n_bursts = static_cast<int>(std::floor(rng.uniform(0.0, 1.0) +
                                                         2.0 + 6.0 * d));
        for (int b = 0; b < n_bursts; ++b) {
            const double fc = rng.uniform(250.0, 2500.0);
            const double dur = rng.uniform(0.2, 0.8);
            const double at = rng.uniform(0.0, kClipSeconds - dur);
            const double amp =
                (2.2 * noise_amp + 0.26 * d) * rng.uniform(0.5, 1.0);
            const double fm = rng.uniform(-80.0, 80.0);
            const int begin = static_cast<int>(at * AudioSegment::kSampleRate);
            const int end = std::min<int>(total,
                begin + static_cast<int>(dur * AudioSegment::kSampleRate));
            for (int i = begin; i < end; ++i) {
                const double t = static_cast<double>(i - begin) / AudioSegment::kSampleRate;
                const double env = std::sin(kPi * t / dur);
                out[i] += static_cast<float>(
                    amp * env * std::sin(2.0 * kPi * (fc + fm * t) * t));
            }
        }
    }

    for (auto& v : out) v = std::clamp(v, -1.0f, 1.0f);
    return out;
}

// ------------------------------------------------------------- video

struct Mover {
    double x, y, vx, vy;
};

void draw_soft_disc(std::vector<float>& plane, int px, double cx, double cy,
                    double radius, double value, double hardness) {
    // box trimmed where the falloff drops below ~1/400
    const double reach = radius * std::sqrt(6.0 / hardness);
    const int x0 = std::max(0, static_cast<int>(cx - reach));
    const int x1 = std::min(px - 1, static_cast<int>(cx + reach));
    const int y0 = std::max(0, static_cast<int>(cy - reach));
    const int y1 = std::min(px - 1, static_cast<int>(cy + reach));
    const float inv_r2 = static_cast<float>(hardness / (radius * radius));
    for (int y = y0; y <= y1; ++y) {
        const float dy2 = static_cast<float>((y - cy) * (y - cy));
        for (int x = x0; x <= x1; ++x) {
            const float dx2 = static_cast<float>((x - cx) * (x - cx));
            const float w = std::min(1.0f, std::exp(-inv_r2 * (dx2 + dy2)));
            float& p = plane[static_cast<std::size_t>(y) * px + x];
            p += (static_cast<float>(value) - p) * w;
        }
    }
}

std::vector<std::vector<float>> render_video(const RecordingPlan& plan,
                                             const SynthConfig& cfg, Rng& rng,
                                             std::vector<PresenceFlag>& timeline) {
    const int px = cfg.frame_px;
    const double d = cfg.difficulty;
    const bool sunset = plan.tags.lighting == Lighting::sunset;

    timeline.assign(kTimelineFrames, PresenceFlag(0));
    const auto starts = video::segment_to_stacks(kTimelineFrames);
    for (int seg = 0; seg < cfg.segments_per_file; ++seg)
        for (int j = 0; j < 7; ++j)
            timeline[starts[seg] + j] = plan.schedule[seg][j];

    // Per-recording scene parameters.
    const double sky_top = (sunset ? 0.62 : 0.55) + rng.uniform(-0.04, 0.04);
    const double sky_bot = (sunset ? 0.42 : 0.80) + rng.uniform(-0.04, 0.04);
    const int n_clouds = rng.uniform_int(2, 4);
    std::vector<Mover> clouds(n_clouds);
    std::vector<double> cloud_r(n_clouds);
    for (int i = 0; i < n_clouds; ++i) {
        clouds[i] = {rng.uniform(0.0, px), rng.uniform(0.0, px * 0.5),
                     rng.uniform(-0.4, 0.4), rng.uniform(-0.1, 0.1)};
        cloud_r[i] = rng.uniform(px * 0.10, px * 0.25);
    }
    const int n_birds = plan.drone ? 0 : 1 + static_cast<int>(std::lround(2 * d));
    std::vector<Mover> birds(n_birds);
    for (auto& b : birds)
        b = {rng.uniform(0.0, px), rng.uniform(0.0, px * 0.6),
             rng.uniform(-2.5, 2.5), rng.uniform(-1.0, 1.0)};

    Mover drone{rng.uniform(px * 0.2, px * 0.8), rng.uniform(px * 0.1, px * 0.5),
                rng.uniform(-1.2, 1.2), rng.uniform(-0.6, 0.6)};
    const double drone_size = (7.0 + 7.0 * (1.0 - d)) * px / 224.0;
    const double contrast = 0.22 + 0.33 * (1.0 - d);
    const double noise_sigma = 0.01 + 0.05 * d + (sunset ? 0.01 : 0.0);
    const double bird_size = 2.5 * px / 224.0;

    std::vector<std::vector<float>> frames(kTimelineFrames);
    std::vector<float> gray(static_cast<std::size_t>(px) * px);

    for (int f = 0; f < kTimelineFrames; ++f) {
        // background gradient
        for (int y = 0; y < px; ++y) {
            const double v = sky_top + (sky_bot - sky_top) * y / (px - 1.0);
            for (int x = 0; x < px; ++x)
                gray[static_cast<std::size_t>(y) * px + x] = static_cast<float>(v);
        }
        if (plan.tags.location == Location::urban) {
            for (int y = px * 3 / 4; y < px; ++y)
                for (int x = 0; x < px; ++x)
                    gray[static_cast<std::size_t>(y) * px + x] = 0.28f;
        }
        for (int i = 0; i < n_clouds; ++i) {
            auto& c = clouds[i];
            c.x += c.vx;
            c.y += c.vy;
            if (c.x < -cloud_r[i]) c.x = px + cloud_r[i];
            if (c.x > px + cloud_r[i]) c.x = -cloud_r[i];
            draw_soft_disc(gray, px, c.x, c.y, cloud_r[i],
                           sunset ? 0.70 : 0.92, 1.2);
        }
        for (auto& b : birds) {
            b.x += b.vx + rng.uniform(-0.3, 0.3);
            b.y += b.vy + rng.uniform(-0.3, 0.3);
            if (b.x < 0 || b.x > px) b.vx = -b.vx;
            if (b.y < 0 || b.y > px * 0.7) b.vy = -b.vy;
            b.x = std::clamp(b.x, 0.0, static_cast<double>(px));
            b.y = std::clamp(b.y, 0.0, px * 0.7);
            draw_soft_disc(gray, px, b.x, b.y, bird_size, 0.15, 2.5);
        }

        drone.x += drone.vx + rng.uniform(-0.2, 0.2);
        drone.y += drone.vy + rng.uniform(-0.2, 0.2);
        if (drone.x < px * 0.08 || drone.x > px * 0.92) drone.vx = -drone.vx;
        if (drone.y < px * 0.05 || drone.y > px * 0.65) drone.vy = -drone.vy;
        drone.x = std::clamp(drone.x, px * 0.08, px * 0.92);
        drone.y = std::clamp(drone.y, px * 0.05, px * 0.65);

        if (plan.drone && timeline[f].present()) {
            // dark body with four rotor dots
            const double base =
                gray[static_cast<std::size_t>(drone.y) * px +
                     static_cast<int>(drone.x)];
            const double body = std::max(0.02, base - contrast);
            draw_soft_disc(gray, px, drone.x, drone.y, drone_size, body, 2.0);
            for (int rx = -1; rx <= 1; rx += 2)
                for (int ry = -1; ry <= 1; ry += 2)
                    draw_soft_disc(gray, px, drone.x + rx * drone_size * 1.5,
                                   drone.y + ry * drone_size * 0.8,
                                   drone_size * 0.45, body * 0.8, 3.0);
        }

        std::vector<float> frame = gray;
        for (auto& v : frame) {
            v += static_cast<float>(noise_sigma * rng.normal());
            v = std::clamp(v, 0.0f, 1.0f);
        }
        frames[f] = std::move(frame);
    }
    return frames;
}

io::ImageU8 frame_to_image(const std::vector<float>& gray, int px, bool sunset) {
    io::ImageU8 img;
    img.height = px;
    img.width = px;
    img.channels = 3;
    img.pixels.resize(static_cast<std::size_t>(px) * px * 3);
    // fixed warm/cool tint so channels are not identical
    const double rk = sunset ? 1.06 : 0.96;
    const double bk = sunset ? 0.88 : 1.05;
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const double v = gray[i];
        auto to8 = [](double x) {
            return static_cast<std::uint8_t>(
                std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
        };
        img.pixels[i * 3 + 0] = to8(v * rk);
        img.pixels[i * 3 + 1] = to8(v);
        img.pixels[i * 3 + 2] = to8(v * bk);
    }
    return img;
}

// ---------------------------------------------------------------- RF

std::vector<std::complex<float>> render_iq_segment(const RecordingPlan& plan,
                                                   const SynthConfig& cfg,
                                                   int seg, double carrier,
                                                   Rng& rng) {
    const std::size_t n = rf::IqSegment::segment_length(cfg.rf_sample_rate);
    const double d = cfg.difficulty;
    std::vector<std::complex<float>> out(n);

    const double floor_sigma = 0.5;
    for (auto& v : out)
        v = {static_cast<float>(floor_sigma * rng.normal()),
             static_cast<float>(floor_sigma * rng.normal())};

    // Sporadic non-periodic wideband bursts in both classes.
    double burst_rate = 0.6 + 2.0 * d;
    if (plan.tags.location == Location::urban) burst_rate *= 2.0;
    const int n_bursts = static_cast<int>(std::floor(rng.uniform(0.0, 1.0) +
                                                     burst_rate));
    for (int b = 0; b < n_bursts; ++b) {
        const std::size_t at = static_cast<std::size_t>(rng.uniform(0.0, 0.9) * n);
        const std::size_t dur = static_cast<std::size_t>(
            rng.uniform(0.001, 0.004) * cfg.rf_sample_rate);
        const double amp = floor_sigma * (1.2 + 1.3 * d) * rng.uniform(0.6, 1.0);
        for (std::size_t i = at; i < std::min(n, at + dur); ++i)
            out[i] += std::complex<float>(static_cast<float>(amp * rng.normal()),
                                          static_cast<float>(amp * rng.normal()));
    }

    if (plan.drone) {
        // Periodic narrowband packets gated by the presence schedule.
        const double amp = floor_sigma * (3.0 - 1.6 * d);
        const std::size_t period = static_cast<std::size_t>(0.005 * cfg.rf_sample_rate);
        const std::size_t pdur = static_cast<std::size_t>(0.0012 * cfg.rf_sample_rate);
        const std::size_t sym = 64;
        const std::size_t sub = n / 7;
        double sym_phase = rng.uniform(0.0, 2.0 * kPi);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = std::min<std::size_t>(6, i / sub);
            if (!plan.schedule[seg][j].present()) continue;
            if (i % period >= pdur) continue;
            if (i % sym == 0)
                sym_phase = (kPi / 2.0) * rng.uniform_int(0, 3) + kPi / 4.0;
            const double ang = 2.0 * kPi * carrier * static_cast<double>(i) + sym_phase;
            out[i] += std::complex<float>(static_cast<float>(amp * std::cos(ang)),
                                          static_cast<float>(amp * std::sin(ang)));
        }
    }
    return out;
}

}  // namespace

void SynthConfig::validate() const {
    if (n_files < 1) throw std::invalid_argument("n_files must be positive");
    if (segments_per_file != 40)
        throw std::invalid_argument("segments_per_file is fixed at 40 "
                                    "(10 s of 0.25 s segments)");
    if (difficulty < 0.0 || difficulty > 1.0)
        throw std::invalid_argument("difficulty must lie in [0, 1]");
    if (class_balance <= 0.0 || class_balance >= 1.0)
        throw std::invalid_argument("class_balance must lie in (0, 1)");
    if (rf_sample_rate < 4096.0 * 4)
        throw std::invalid_argument("rf_sample_rate too low for the stft");
    if (frame_px < 16) throw std::invalid_argument("frame_px too small");
}

std::vector<std::array<PresenceFlag, 7>> presence_schedule(int segments,
                                                           Rng& rng) {
    if (segments <= 0) throw std::invalid_argument("segments must be positive");
    std::vector<std::array<PresenceFlag, 7>> schedule(segments);
    for (auto& seg : schedule) {
        for (auto& f : seg) f = PresenceFlag(1);
        if (rng.uniform() < 0.2) {
            // partial presence: keep 2..6 frames present
            const int keep = rng.uniform_int(2, 6);
            std::array<int, 7> order{0, 1, 2, 3, 4, 5, 6};
            for (int i = 6; i > 0; --i)
                std::swap(order[i], order[rng.uniform_int(0, i)]);
            for (int i = keep; i < 7; ++i) seg[order[i]] = PresenceFlag(0);
        }
    }
    return schedule;
}

fs::path generate_dataset(const SynthConfig& cfg, const fs::path& out_dir) {
    cfg.validate();
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw std::runtime_error("cannot create output directory: " +
                                 out_dir.string());

    // Recording plans (labels, conditions, schedules) drawn up front so the
    // parallel generation below is order-independent.
    std::vector<RecordingPlan> plans(cfg.n_files);
    {
        Rng rng = Rng::derive(cfg.seed, "plans");
        std::vector<int> order(cfg.n_files);
        std::iota(order.begin(), order.end(), 0);
        for (int i = cfg.n_files - 1; i > 0; --i)
            std::swap(order[i], order[rng.uniform_int(0, i)]);
        const int n_drone =
            static_cast<int>(std::lround(cfg.class_balance * cfg.n_files));
        for (int i = 0; i < cfg.n_files; ++i) {
            RecordingPlan& p = plans[order[i]];
            p.drone = i < n_drone;
        }
        for (int i = 0; i < cfg.n_files; ++i) {
            RecordingPlan& p = plans[i];
            p.index = i;
            p.tags.lighting = rng.uniform() < cfg.p_daylight ? Lighting::daylight
                                                             : Lighting::sunset;
            p.tags.location = rng.uniform() < cfg.p_urban ? Location::urban
                                                          : Location::non_urban;
            p.tags.los = rng.uniform() < cfg.p_los ? Los::los : Los::nlos;
            Rng srng = Rng::derive(cfg.seed, "schedule_" + std::to_string(i));
            if (p.drone) {
                p.schedule = presence_schedule(cfg.segments_per_file, srng);
            } else {
                p.schedule.assign(cfg.segments_per_file, {});
            }
        }
    }

    std::vector<std::vector<ManifestEntry>> per_rec(cfg.n_files);
    std::vector<std::string> failures(cfg.n_files);

#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < cfg.n_files; ++r) {
        try {
            const RecordingPlan& plan = plans[r];
            Rng rng = Rng::derive(cfg.seed, "recording_" + std::to_string(r));
            const std::string rec_id = "rec" + zero_pad(r, 4);
            const fs::path rec_dir = out_dir / rec_id;
            fs::create_directories(rec_dir);

            const std::vector<float> audio = render_audio(plan, cfg, rng);
            std::vector<PresenceFlag> timeline;
            const auto frames = render_video(plan, cfg, rng, timeline);
            const auto starts = video::segment_to_stacks(kTimelineFrames);
            const double carrier = rng.uniform(-0.35, 0.35);
            const bool sunset = plan.tags.lighting == Lighting::sunset;

            std::vector<ManifestEntry> entries;
            for (int seg = 0; seg < cfg.segments_per_file; ++seg) {
                const std::string seg_id = "seg" + zero_pad(seg, 3);
                const fs::path wav_path = rec_dir / (seg_id + ".wav");
                const fs::path frames_dir = rec_dir / (seg_id + "_frames");
                const fs::path iq_path = rec_dir / (seg_id + ".iq");
                fs::create_directories(frames_dir);

                std::vector<float> seg_audio(
                    audio.begin() + static_cast<std::ptrdiff_t>(seg) *
                                        AudioSegment::kLength,
                    audio.begin() + static_cast<std::ptrdiff_t>(seg + 1) *
                                        AudioSegment::kLength);
                io::write_wav(wav_path, seg_audio, AudioSegment::kSampleRate);

                for (int j = 0; j < 7; ++j) {
                    const auto img =
                        frame_to_image(frames[starts[seg] + j], cfg.frame_px,
                                       sunset);
                    io::write_png(frames_dir /
                                      ("frame_" + zero_pad(j, 6) + ".png"),
                                  img);
                }

                rf::write_iq(iq_path,
                             render_iq_segment(plan, cfg, seg, carrier, rng));

                ManifestEntry e;
                e.sample_id = rec_id + "_" + seg_id;
                e.audio_path = wav_path;
                e.frames_dir = frames_dir;
                e.iq_path = iq_path;
                const std::array<PresenceFlag, 7>& flags = plan.schedule[seg];
                e.label = label_from_frames(
                    std::span<const PresenceFlag>(flags.data(), flags.size()));
                e.tags = plan.tags;
                entries.push_back(std::move(e));
            }
            per_rec[r] = std::move(entries);
        } catch (const std::exception& e) {
            failures[r] = e.what();
        }
    }

    for (const auto& f : failures)
        if (!f.empty()) throw std::runtime_error("generation failed: " + f);

    std::vector<ManifestEntry> all;
    for (auto& v : per_rec)
        for (auto& e : v) all.push_back(std::move(e));
    all = split_dataset(std::move(all), SplitRatios{}, cfg.seed);

    const fs::path manifest = out_dir / "manifest.tsv";
    save_manifest(all, manifest);

    // Dataset metadata consumed by downstream commands (the I/Q sample rate
    // is a dataset property, not a manifest field).
    config::RunConfig meta;
    meta.set("data", "rf_sample_rate", std::to_string(cfg.rf_sample_rate));
    meta.set("data", "files", std::to_string(cfg.n_files));
    meta.set("data", "difficulty", std::to_string(cfg.difficulty));
    meta.set("data", "class_balance", std::to_string(cfg.class_balance));
    meta.set("data", "seed", std::to_string(cfg.seed));
    std::ofstream meta_out(out_dir / "dataset.cfg");
    meta_out << meta.serialize();

    return manifest;
}

}  // namespace trident::synth
