#include "trident/augmentation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace trident::augment {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::atomic<std::uint64_t> g_augment_calls{0};

float clamp01(float v) { return std::clamp(v, 0.0f, 1.0f); }

}  // namespace

std::uint64_t augment_call_count() { return g_augment_calls.load(); }

ScenarioPreset low_noise_preset() {
    return {"low_noise", 3.54, 0.9597, 15.0, 20.0};
}
ScenarioPreset high_noise_preset() {
    return {"high_noise", 11.82, 0.7271, 5.0, 10.0};
}
ScenarioPreset preset_by_name(const std::string& name) {
    if (name == "low_noise") return low_noise_preset();
    if (name == "high_noise") return high_noise_preset();
    throw std::invalid_argument("unknown scenario preset: " + name);
}

AudioOps audio_ops_at_intensity(double intensity) {
    AudioOps ops;
    ops.background_noise_gain = intensity;
    ops.harmonic_distortion = 0.2 * intensity;
    ops.clicks_per_second = 8.0 * intensity;
    return ops;
}

VisualOps visual_ops_at_intensity(double intensity) {
    VisualOps ops;
    ops.noise_sigma = 0.50 * intensity;
    ops.blur_sigma = 0.9 * intensity;
    ops.salt_pepper_p = 0.08 * intensity;
    return ops;
}

AudioSegment augment_audio(const AudioSegment& segment, const AudioOps& ops,
                           Rng& rng) {
    segment.validate();
    AudioSegment out = segment;
    auto& s = out.samples;
    const int n = static_cast<int>(s.size());

    if (ops.pitch_shift_semitones != 0.0) {
        // Resample by the pitch ratio, then trim/extend to the original
        // length (tail padded with the last sample).
        const double ratio = std::pow(2.0, ops.pitch_shift_semitones / 12.0);
        std::vector<float> shifted(s.size());
        for (int i = 0; i < n; ++i) {
            const double src = i * ratio;
            const int i0 = static_cast<int>(src);
            const double f = src - i0;
            const float a = s[std::min(i0, n - 1)];
            const float b = s[std::min(i0 + 1, n - 1)];
            shifted[i] = static_cast<float>(a + f * (b - a));
        }
        s = std::move(shifted);
    }

    if (ops.harmonic_distortion > 0.0) {
        const double a = ops.harmonic_distortion;
        for (auto& v : s)
            v = static_cast<float>((1.0 - a) * v + a * std::tanh(3.0 * v));
    }

    if (ops.background_noise_gain > 0.0) {
        const float g = static_cast<float>(ops.background_noise_gain);
        for (auto& v : s) v += g * rng.normal_f();
    }

    if (ops.clicks_per_second > 0.0) {
        const double expected = ops.clicks_per_second * 0.25;
        const int n_clicks = static_cast<int>(expected) +
                             (rng.uniform() < expected - static_cast<int>(expected) ? 1 : 0);
        for (int c = 0; c < n_clicks; ++c) {
            const int pos = rng.uniform_int(0, n - 1);
            const float amp = static_cast<float>(rng.uniform(0.5, 1.0)) *
                              (rng.bernoulli(0.5) ? 1.0f : -1.0f);
            s[pos] = amp;
        }
    }

    // mono_conversion: inputs are single-channel already, kept as an explicit
    // no-op so configs can state it.
    if (ops.volume_scale != 1.0) {
        const float k = static_cast<float>(ops.volume_scale);
        for (auto& v : s) v *= k;
    }

    for (auto& v : s) v = std::clamp(v, -1.0f, 1.0f);
    return out;
}

namespace {

void gaussian_blur_plane(std::vector<float>& plane, int h, int w, double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    if (radius < 1) return;
    std::vector<float> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] =
            static_cast<float>(std::exp(-0.5 * i * i / (sigma * sigma)));
        sum += kernel[i + radius];
    }
    for (auto& k : kernel) k = static_cast<float>(k / sum);

    std::vector<float> tmp(plane.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            float acc = 0.0f;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * plane[y * w + std::clamp(x + i, 0, w - 1)];
            tmp[y * w + x] = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            float acc = 0.0f;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp[std::clamp(y + i, 0, h - 1) * w + x];
            plane[y * w + x] = acc;
        }
}

void rotate_plane(std::vector<float>& plane, int h, int w, double degrees) {
    const double rad = degrees * kPi / 180.0;
    const double c = std::cos(rad), s = std::sin(rad);
    const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
    std::vector<float> out(plane.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            // inverse map with edge clamp
            const double dx = x - cx, dy = y - cy;
            const double sx = c * dx + s * dy + cx;
            const double sy = -s * dx + c * dy + cy;
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            const double fx = sx - x0, fy = sy - y0;
            auto at = [&](int yy, int xx) {
                return plane[std::clamp(yy, 0, h - 1) * w + std::clamp(xx, 0, w - 1)];
            };
            out[y * w + x] = static_cast<float>(
                at(y0, x0) * (1 - fy) * (1 - fx) + at(y0, x0 + 1) * (1 - fy) * fx +
                at(y0 + 1, x0) * fy * (1 - fx) + at(y0 + 1, x0 + 1) * fy * fx);
        }
    plane = std::move(out);
}

}  // namespace

FrameStack augment_visual(const FrameStack& stack, const VisualOps& ops,
                          Rng& rng) {
    if (ops.rotation_degrees < -180.0 || ops.rotation_degrees > 180.0)
        throw std::invalid_argument("rotation outside [-180, 180] degrees");

    Tensor t = stack.values;
    const int hw = FrameStack::kSize * FrameStack::kSize;
    const int h = FrameStack::kSize, w = FrameStack::kSize;

    for (int f = 0; f < FrameStack::kFrames; ++f) {
        for (int c = 0; c < 3; ++c) {
            float* p = t.data() + (static_cast<std::size_t>(f) * 3 + c) * hw;
            std::vector<float> plane(p, p + hw);

            if (ops.horizontal_flip) {
                for (int y = 0; y < h; ++y)
                    std::reverse(plane.begin() + y * w, plane.begin() + (y + 1) * w);
            }
            if (ops.rotation_degrees != 0.0)
                rotate_plane(plane, h, w, ops.rotation_degrees);
            if (ops.blur_sigma > 0.0)
                gaussian_blur_plane(plane, h, w, ops.blur_sigma);
            if (ops.contrast != 1.0 || ops.brightness != 0.0) {
                for (auto& v : plane)
                    v = static_cast<float>((v - 0.5) * ops.contrast + 0.5 +
                                           ops.brightness);
            }
            std::copy(plane.begin(), plane.end(), p);
        }

        // Pixel noise is drawn per frame; the same draw applies across the
        // three channels of a pixel so it behaves like sensor noise.
        if (ops.noise_sigma > 0.0) {
            float* base = t.data() + static_cast<std::size_t>(f) * 3 * hw;
            for (int i = 0; i < hw; ++i) {
                const float e = static_cast<float>(ops.noise_sigma) * rng.normal_f();
                base[i] += e;
                base[hw + i] += e;
                base[2 * hw + i] += e;
            }
        }
        if (ops.salt_pepper_p > 0.0) {
            float* base = t.data() + static_cast<std::size_t>(f) * 3 * hw;
            for (int i = 0; i < hw; ++i) {
                if (rng.uniform() < ops.salt_pepper_p) {
                    const float v = rng.bernoulli(0.5) ? 1.0f : 0.0f;
                    base[i] = v;
                    base[hw + i] = v;
                    base[2 * hw + i] = v;
                }
            }
        }
    }

    for (std::size_t i = 0; i < t.size(); ++i) t[i] = clamp01(t[i]);
    return FrameStack(std::move(t));
}

double compute_snr(const rf::IqSegment& signal, const rf::IqSegment& noise) {
    if (signal.samples.empty() || noise.samples.empty())
        throw std::invalid_argument("snr needs non-empty inputs");
    auto power = [](const rf::IqSegment& s) {
        double p = 0.0;
        for (const auto& v : s.samples) p += std::norm(std::complex<double>(v));
        return p / static_cast<double>(s.samples.size());
    };
    const double ps = power(signal);
    const double pn = power(noise);
    if (pn <= 0.0) throw std::invalid_argument("zero noise power");
    return 10.0 * std::log10(ps / pn);
}

rf::IqSegment augment_rf(const rf::IqSegment& signal, const rf::IqSegment& noise,
                         double target_snr_db) {
    if (signal.samples.size() != noise.samples.size())
        throw std::invalid_argument("signal and noise lengths differ");
    double ps = 0.0, pn = 0.0;
    for (const auto& v : signal.samples) ps += std::norm(std::complex<double>(v));
    for (const auto& v : noise.samples) pn += std::norm(std::complex<double>(v));
    ps /= static_cast<double>(signal.samples.size());
    pn /= static_cast<double>(noise.samples.size());
    if (pn <= 0.0) throw std::invalid_argument("zero noise power");
    if (ps <= 0.0) throw std::invalid_argument("zero signal power");

    const double alpha = std::sqrt(ps / (pn * std::pow(10.0, target_snr_db / 10.0)));
    rf::IqSegment out = signal;
    for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] += static_cast<float>(alpha) * noise.samples[i];
    return out;
}

rf::IqSegment synth_interference(std::size_t length, double sample_rate,
                                 Rng& rng) {
    rf::IqSegment seg;
    seg.sample_rate = sample_rate;
    seg.samples.resize(length);

    // Band-limited noise bursts: white noise mixed up to a few random band
    // centers through single-pole smoothing, with slow on/off envelopes,
    // over a weak wideband floor.
    const int n_bands = rng.uniform_int(2, 3);
    std::vector<double> center(n_bands), bw(n_bands), amp(n_bands);
    for (int b = 0; b < n_bands; ++b) {
        center[b] = rng.uniform(-0.38, 0.38);  // cycles per sample
        bw[b] = rng.uniform(0.05, 0.18);       // smoothing constant
        amp[b] = rng.uniform(0.5, 1.0);
    }
    const std::size_t burst = std::max<std::size_t>(64, length / 6);
    std::vector<char> gate_on(n_bands, 1);
    std::vector<std::complex<double>> state(n_bands, 0.0);

    for (std::size_t i = 0; i < length; ++i) {
        if (i % burst == 0)
            for (int b = 0; b < n_bands; ++b) gate_on[b] = rng.bernoulli(0.75);
        std::complex<double> acc(rng.normal() * 0.25, rng.normal() * 0.25);
        for (int b = 0; b < n_bands; ++b) {
            const std::complex<double> w(rng.normal(), rng.normal());
            state[b] += bw[b] * (w - state[b]);  // low-pass envelope
            if (!gate_on[b]) continue;
            const double ang = 2.0 * kPi * center[b] * static_cast<double>(i);
            acc += amp[b] * state[b] *
                   std::complex<double>(std::cos(ang), std::sin(ang));
        }
        seg.samples[i] = std::complex<float>(acc);
    }

    // Normalize to unit average power.
    double p = 0.0;
    for (const auto& v : seg.samples) p += std::norm(std::complex<double>(v));
    p /= static_cast<double>(length);
    const float k = static_cast<float>(1.0 / std::sqrt(std::max(p, 1e-30)));
    for (auto& v : seg.samples) v *= k;
    return seg;
}

double compute_mcd(const MfccGrid& real, const MfccGrid& aug) {
    if (!real.values.same_shape(aug.values))
        throw std::invalid_argument("mcd shape mismatch");
    const int T = MfccGrid::kFrames;
    const int M = MfccGrid::kCoeffs;
    double total = 0.0;
    for (int t = 0; t < T; ++t) {
        double sq = 0.0;
        for (int m = 0; m < M; ++m) {
            const double d = static_cast<double>(real.values[t * M + m]) -
                             aug.values[t * M + m];
            sq += d * d;
        }
        total += std::sqrt(sq);
    }
    return 10.0 * std::sqrt(2.0) / std::log(10.0) * total / T;
}

double compute_ssim(std::span<const float> x, std::span<const float> y,
                    int height, int width) {
    if (x.size() != y.size() ||
        x.size() != static_cast<std::size_t>(height) * width)
        throw std::invalid_argument("ssim shape mismatch");
    constexpr int W = 8;
    if (height < W || width < W)
        throw std::invalid_argument("image smaller than ssim window");
    constexpr double C1 = 0.01 * 0.01;  // (0.01 * L)^2 with L = 1
    constexpr double C2 = 0.03 * 0.03;

    // Integral images of x, y, x^2, y^2, xy make each 8x8 window O(1).
    const int iw = width + 1;
    const std::size_t isz = static_cast<std::size_t>(height + 1) * iw;
    std::vector<double> sx(isz, 0.0), sy(isz, 0.0), sxx(isz, 0.0),
        syy(isz, 0.0), sxy(isz, 0.0);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const double vx = x[static_cast<std::size_t>(r) * width + c];
            const double vy = y[static_cast<std::size_t>(r) * width + c];
            const std::size_t i = static_cast<std::size_t>(r + 1) * iw + c + 1;
            const std::size_t up = i - iw, left = i - 1, diag = up - 1;
            sx[i] = vx + sx[up] + sx[left] - sx[diag];
            sy[i] = vy + sy[up] + sy[left] - sy[diag];
            sxx[i] = vx * vx + sxx[up] + sxx[left] - sxx[diag];
            syy[i] = vy * vy + syy[up] + syy[left] - syy[diag];
            sxy[i] = vx * vy + sxy[up] + sxy[left] - sxy[diag];
        }
    }
    auto window_sum = [&](const std::vector<double>& s, int r, int c) {
        const std::size_t a = static_cast<std::size_t>(r) * iw + c;
        const std::size_t b = static_cast<std::size_t>(r) * iw + c + W;
        const std::size_t d = static_cast<std::size_t>(r + W) * iw + c;
        const std::size_t e = static_cast<std::size_t>(r + W) * iw + c + W;
        return s[e] - s[b] - s[d] + s[a];
    };

    const double n = W * W;
    double total = 0.0;
    std::size_t count = 0;
    for (int r = 0; r + W <= height; ++r) {
        for (int c = 0; c + W <= width; ++c) {
            const double mx = window_sum(sx, r, c) / n;
            const double my = window_sum(sy, r, c) / n;
            const double vx = window_sum(sxx, r, c) / n - mx * mx;
            const double vy = window_sum(syy, r, c) / n - my * my;
            const double cov = window_sum(sxy, r, c) / n - mx * my;
            const double num = (2.0 * mx * my + C1) * (2.0 * cov + C2);
            const double den = (mx * mx + my * my + C1) * (vx + vy + C2);
            total += num / den;
            ++count;
        }
    }
    return total / static_cast<double>(count);
}

double compute_ssim(const FrameStack& a, const FrameStack& b) {
    const int hw = FrameStack::kSize * FrameStack::kSize;
    double total = 0.0;
    for (int f = 0; f < FrameStack::kFrames; ++f) {
        std::vector<float> la(hw), lb(hw);
        const float* pa = a.values.data() + static_cast<std::size_t>(f) * 3 * hw;
        const float* pb = b.values.data() + static_cast<std::size_t>(f) * 3 * hw;
        for (int i = 0; i < hw; ++i) {
            la[i] = (pa[i] + pa[hw + i] + pa[2 * hw + i]) / 3.0f;
            lb[i] = (pb[i] + pb[hw + i] + pb[2 * hw + i]) / 3.0f;
        }
        total += compute_ssim(la, lb, FrameStack::kSize, FrameStack::kSize);
    }
    return total / FrameStack::kFrames;
}

MultiModalSample augment_sample(const MultiModalSample& sample,
                                const rf::IqSegment& raw_iq,
                                const AugmentationConfig& config,
                                const std::string& sample_id,
                                rf::IqSegment* augmented_iq) {
    g_augment_calls.fetch_add(1, std::memory_order_relaxed);
    MultiModalSample out = sample;

    Rng audio_rng = Rng::derive(config.seed, sample_id + "/audio");
    out.audio = augment_audio(sample.audio, config.audio, audio_rng);

    Rng visual_rng = Rng::derive(config.seed, sample_id + "/visual");
    out.video = augment_visual(sample.video, config.visual, visual_rng);

    if (config.rf.enabled) {
        Rng rf_rng = Rng::derive(config.seed, sample_id + "/rf");
        const double target =
            rf_rng.uniform(config.rf.snr_min_db, config.rf.snr_max_db);
        const rf::IqSegment noise =
            synth_interference(raw_iq.samples.size(), raw_iq.sample_rate, rf_rng);
        rf::IqSegment mixed = augment_rf(raw_iq, noise, target);
        out.rf = rf::stft_spectrogram(mixed);
        if (augmented_iq) *augmented_iq = std::move(mixed);
    } else if (augmented_iq) {
        *augmented_iq = raw_iq;
    }
    return out;
}

AugmentationConfig calibrate_scenario(const ScenarioPreset& preset,
                                      std::span<const MultiModalSample> probes,
                                      std::uint64_t seed) {
    if (probes.size() < 20)
        throw std::invalid_argument("calibration needs at least 20 probe samples");

    const audio::MfccConfig mfcc_cfg;
    std::vector<MfccGrid> clean_grids;
    clean_grids.reserve(probes.size());
    for (const auto& p : probes)
        clean_grids.push_back(audio::mfcc_extract(p.audio, mfcc_cfg));

    auto mean_mcd = [&](double intensity) {
        const AudioOps ops = audio_ops_at_intensity(intensity);
        double total = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            Rng rng = Rng::derive(seed, "cal_audio_" + std::to_string(i));
            const AudioSegment aug = augment_audio(probes[i].audio, ops, rng);
            total += compute_mcd(clean_grids[i],
                                 audio::mfcc_extract(aug, mfcc_cfg));
        }
        return total / static_cast<double>(probes.size());
    };
    auto mean_ssim = [&](double intensity) {
        const VisualOps ops = visual_ops_at_intensity(intensity);
        double total = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            Rng rng = Rng::derive(seed, "cal_visual_" + std::to_string(i));
            total += compute_ssim(probes[i].video,
                                  augment_visual(probes[i].video, ops, rng));
        }
        return total / static_cast<double>(probes.size());
    };

    AugmentationConfig cfg;
    cfg.seed = seed;

    if (preset.target_mcd_db <= 0.0) {
        cfg.audio = audio_ops_at_intensity(0.0);
        cfg.achieved_mcd_db = 0.0;
    } else {
        const double at_max = mean_mcd(1.0);
        if (at_max < preset.target_mcd_db)
            throw std::runtime_error(
                "mcd target " + std::to_string(preset.target_mcd_db) +
                " dB unreachable; achieved " + std::to_string(at_max) +
                " dB at full intensity");
        double lo = 0.0, hi = 1.0, achieved = at_max;
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            achieved = mean_mcd(mid);
            if (std::abs(achieved - preset.target_mcd_db) < 0.05) {
                lo = hi = mid;
                break;
            }
            (achieved < preset.target_mcd_db ? lo : hi) = mid;
        }
        cfg.audio = audio_ops_at_intensity(0.5 * (lo + hi));
        cfg.achieved_mcd_db = mean_mcd(0.5 * (lo + hi));
    }

    if (preset.target_ssim >= 1.0) {
        cfg.visual = visual_ops_at_intensity(0.0);
        cfg.achieved_ssim = 1.0;
    } else {
        const double at_max = mean_ssim(1.0);
        if (at_max > preset.target_ssim)
            throw std::runtime_error(
                "ssim target " + std::to_string(preset.target_ssim) +
                " unreachable; achieved " + std::to_string(at_max) +
                " at full intensity");
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 40; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double achieved = mean_ssim(mid);
            if (std::abs(achieved - preset.target_ssim) < 0.002) {
                lo = hi = mid;
                break;
            }
            // SSIM decreases with intensity.
            (achieved > preset.target_ssim ? lo : hi) = mid;
        }
        cfg.visual = visual_ops_at_intensity(0.5 * (lo + hi));
        cfg.achieved_ssim = mean_ssim(0.5 * (lo + hi));
    }

    cfg.rf.enabled = true;
    cfg.rf.snr_min_db = preset.snr_min_db;
    cfg.rf.snr_max_db = preset.snr_max_db;
    return cfg;
}

void save_config(const std::filesystem::path& path,
                 const AugmentationConfig& cfg) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write augment config: " + path.string());
    out << "# resolved augmentation config\n";
    out << "seed = " << cfg.seed << "\n";
    out << "audio.background_noise_gain = " << cfg.audio.background_noise_gain << "\n";
    out << "audio.harmonic_distortion = " << cfg.audio.harmonic_distortion << "\n";
    out << "audio.pitch_shift_semitones = " << cfg.audio.pitch_shift_semitones << "\n";
    out << "audio.clicks_per_second = " << cfg.audio.clicks_per_second << "\n";
    out << "audio.mono_conversion = " << (cfg.audio.mono_conversion ? 1 : 0) << "\n";
    out << "audio.volume_scale = " << cfg.audio.volume_scale << "\n";
    out << "visual.noise_sigma = " << cfg.visual.noise_sigma << "\n";
    out << "visual.horizontal_flip = " << (cfg.visual.horizontal_flip ? 1 : 0) << "\n";
    out << "visual.rotation_degrees = " << cfg.visual.rotation_degrees << "\n";
    out << "visual.brightness = " << cfg.visual.brightness << "\n";
    out << "visual.contrast = " << cfg.visual.contrast << "\n";
    out << "visual.blur_sigma = " << cfg.visual.blur_sigma << "\n";
    out << "visual.salt_pepper_p = " << cfg.visual.salt_pepper_p << "\n";
    out << "rf.enabled = " << (cfg.rf.enabled ? 1 : 0) << "\n";
    out << "rf.snr_min_db = " << cfg.rf.snr_min_db << "\n";
    out << "rf.snr_max_db = " << cfg.rf.snr_max_db << "\n";
    out << "achieved.mcd_db = " << cfg.achieved_mcd_db << "\n";
    out << "achieved.ssim = " << cfg.achieved_ssim << "\n";
}

AugmentationConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open augment config: " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("malformed augment config line: " + line);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto num = [&](const std::string& key, double fallback) {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : std::stod(it->second);
    };
    AugmentationConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(num("seed", 0));
    cfg.audio.background_noise_gain = num("audio.background_noise_gain", 0);
    cfg.audio.harmonic_distortion = num("audio.harmonic_distortion", 0);
    cfg.audio.pitch_shift_semitones = num("audio.pitch_shift_semitones", 0);
    cfg.audio.clicks_per_second = num("audio.clicks_per_second", 0);
    cfg.audio.mono_conversion = num("audio.mono_conversion", 0) != 0;
    cfg.audio.volume_scale = num("audio.volume_scale", 1);
    cfg.visual.noise_sigma = num("visual.noise_sigma", 0);
    cfg.visual.horizontal_flip = num("visual.horizontal_flip", 0) != 0;
    cfg.visual.rotation_degrees = num("visual.rotation_degrees", 0);
    cfg.visual.brightness = num("visual.brightness", 0);
    cfg.visual.contrast = num("visual.contrast", 1);
    cfg.visual.blur_sigma = num("visual.blur_sigma", 0);
    cfg.visual.salt_pepper_p = num("visual.salt_pepper_p", 0);
    cfg.rf.enabled = num("rf.enabled", 0) != 0;
    cfg.rf.snr_min_db = num("rf.snr_min_db", 0);
    cfg.rf.snr_max_db = num("rf.snr_max_db", 0);
    cfg.achieved_mcd_db = num("achieved.mcd_db", 0);
    cfg.achieved_ssim = num("achieved.ssim", 1);
    return cfg;
}

}  // namespace trident::augment
