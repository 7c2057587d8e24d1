#include <doctest.h>

#include <cmath>
#include <vector>

#include "trident/augmentation.hpp"
#include "trident/rng.hpp"

using namespace trident;
using namespace trident::augment;

TEST_SUITE_BEGIN("augmentation");

namespace {

MfccGrid random_grid(Rng& rng) {
    MfccGrid g;
    for (std::size_t i = 0; i < g.values.size(); ++i)
        g.values[i] = 5.0f * rng.normal_f();
    return g;
}

FrameStack random_stack(Rng& rng) {
    FrameStack s;
    for (std::size_t i = 0; i < s.values.size(); ++i)
        s.values[i] = static_cast<float>(rng.uniform());
    return s;
}

AudioSegment random_audio(Rng& rng, float amp = 0.2f) {
    AudioSegment seg;
    seg.samples.resize(AudioSegment::kLength);
    for (auto& v : seg.samples) v = amp * rng.normal_f();
    return seg;
}

// Literal transcription of the distortion sum, kept deliberately naive.
double mcd_oracle(const MfccGrid& a, const MfccGrid& b) {
    const int T = 40, M = 40;
    double total = 0.0;
    for (int t = 0; t < T; ++t) {
        double inner = 0.0;
        for (int m = 0; m < M; ++m) {
            const double d = static_cast<double>(a.values[t * M + m]) -
                             static_cast<double>(b.values[t * M + m]);
            inner += d * d;
        }
        total += std::sqrt(inner);
    }
    return (10.0 * std::sqrt(2.0) / std::log(10.0)) * total / T;
}

// Naive sliding-window transcription of the similarity index.
double ssim_oracle(const std::vector<float>& x, const std::vector<float>& y,
                   int h, int w) {
    const int W = 8;
    const double C1 = 1e-4, C2 = 9e-4;
    double total = 0.0;
    int count = 0;
    for (int r = 0; r + W <= h; ++r) {
        for (int c = 0; c + W <= w; ++c) {
            double mx = 0, my = 0;
            for (int i = 0; i < W; ++i)
                for (int j = 0; j < W; ++j) {
                    mx += x[(r + i) * w + c + j];
                    my += y[(r + i) * w + c + j];
                }
            mx /= 64.0;
            my /= 64.0;
            double vx = 0, vy = 0, cov = 0;
            for (int i = 0; i < W; ++i)
                for (int j = 0; j < W; ++j) {
                    const double dx = x[(r + i) * w + c + j] - mx;
                    const double dy = y[(r + i) * w + c + j] - my;
                    vx += dx * dx;
                    vy += dy * dy;
                    cov += dx * dy;
                }
            vx /= 64.0;
            vy /= 64.0;
            cov /= 64.0;
            total += (2 * mx * my + C1) * (2 * cov + C2) /
                     ((mx * mx + my * my + C1) * (vx + vy + C2));
            ++count;
        }
    }
    return total / count;
}

}  // namespace

TEST_CASE("mcd of identical grids is zero; the unit constant matches") {
    Rng rng(3);
    const MfccGrid g = random_grid(rng);
    CHECK(compute_mcd(g, g) == doctest::Approx(0.0));

    // single differing coefficient of magnitude 1 in one frame:
    // constant 10*sqrt(2)/ln(10) spread over the 40-frame average
    MfccGrid a, b;
    b.values[5 * 40 + 3] = 1.0f;
    const double unit = 10.0 * std::sqrt(2.0) / std::log(10.0);
    CHECK(unit == doctest::Approx(6.1418).epsilon(1e-4));
    CHECK(compute_mcd(a, b) == doctest::Approx(unit / 40.0).epsilon(1e-9));
}

TEST_CASE("mcd matches a literal transcription on random pairs") {
    Rng rng(5);
    for (int trial = 0; trial < 110; ++trial) {
        const MfccGrid a = random_grid(rng);
        const MfccGrid b = random_grid(rng);
        CHECK(compute_mcd(a, b) ==
              doctest::Approx(mcd_oracle(a, b)).epsilon(1e-9));
    }
}

TEST_CASE("ssim basics: identity, anticorrelation, shape errors") {
    Rng rng(7);
    const int h = 24, w = 24;
    std::vector<float> x(h * w);
    for (auto& v : x) v = rng.uniform() < 0.5 ? 0.0f : 1.0f;  // binary image
    CHECK(compute_ssim(x, x, h, w) == doctest::Approx(1.0).epsilon(1e-9));

    std::vector<float> inv(h * w);
    for (int i = 0; i < h * w; ++i) inv[i] = 1.0f - x[i];
    CHECK(compute_ssim(x, inv, h, w) < 0.0);

    std::vector<float> small(16);
    CHECK_THROWS(compute_ssim(small, small, 4, 4));
}

TEST_CASE("ssim matches a naive windowed transcription on random pairs") {
    Rng rng(9);
    for (int trial = 0; trial < 110; ++trial) {
        const int h = rng.uniform_int(8, 20), w = rng.uniform_int(8, 20);
        std::vector<float> x(static_cast<std::size_t>(h) * w),
            y(static_cast<std::size_t>(h) * w);
        for (auto& v : x) v = static_cast<float>(rng.uniform());
        for (auto& v : y) v = static_cast<float>(rng.uniform());
        CHECK(compute_ssim(x, y, h, w) ==
              doctest::Approx(ssim_oracle(x, y, h, w)).epsilon(1e-9));
    }
}

TEST_CASE("snr formula and the mixing rule") {
    Rng rng(11);
    rf::IqSegment s, n;
    s.sample_rate = n.sample_rate = 16384.0;
    s.samples.resize(4096);
    n.samples.resize(4096);
    for (auto& v : s.samples) v = {rng.normal_f(), rng.normal_f()};
    for (auto& v : n.samples) v = {rng.normal_f(), rng.normal_f()};

    // equal power within sampling noise
    CHECK(std::fabs(compute_snr(s, n)) < 0.5);

    rf::IqSegment loud = s;
    for (auto& v : loud.samples) v *= 10.0f;  // 100x power
    CHECK(compute_snr(loud, n) == doctest::Approx(20.0).epsilon(0.02));

    // random pairs against the direct formula
    for (int trial = 0; trial < 110; ++trial) {
        for (auto& v : s.samples) v = {rng.normal_f(), 0.5f * rng.normal_f()};
        for (auto& v : n.samples) v = {0.3f * rng.normal_f(), rng.normal_f()};
        double ps = 0, pn = 0;
        for (const auto& v : s.samples) ps += std::norm(std::complex<double>(v));
        for (const auto& v : n.samples) pn += std::norm(std::complex<double>(v));
        const double want = 10.0 * std::log10(ps / pn);
        CHECK(compute_snr(s, n) == doctest::Approx(want).epsilon(1e-9));
    }

    rf::IqSegment zero = n;
    for (auto& v : zero.samples) v = {0.0f, 0.0f};
    CHECK_THROWS(compute_snr(s, zero));
}

TEST_CASE("rf mixing hits the target snr within 0.01 dB") {
    Rng rng(13);
    rf::IqSegment s, n;
    s.sample_rate = n.sample_rate = 16384.0;
    s.samples.resize(4096);
    n.samples.resize(4096);
    for (auto& v : s.samples) v = {rng.normal_f(), rng.normal_f()};
    for (auto& v : n.samples) v = {0.7f * rng.normal_f(), 0.7f * rng.normal_f()};

    for (double target : {0.0, 5.0, 10.0, 15.0, 20.0}) {
        const rf::IqSegment mixed = augment_rf(s, n, target);
        // recover the added noise and check its power against the signal
        rf::IqSegment added = mixed;
        for (std::size_t i = 0; i < added.samples.size(); ++i)
            added.samples[i] -= s.samples[i];
        CHECK(compute_snr(s, added) == doctest::Approx(target).epsilon(1e-4));
    }
    CHECK(std::pow(10.0, 20.0 / 10.0) == doctest::Approx(100.0));
}

TEST_CASE("audio ops: identities and noise power") {
    Rng seed_rng(17);
    const AudioSegment seg = random_audio(seed_rng);

    AudioOps identity;
    identity.volume_scale = 1.0;
    Rng r1(1);
    const AudioSegment same = augment_audio(seg, identity, r1);
    CHECK(same.samples == seg.samples);

    AudioOps zero_gain;
    zero_gain.background_noise_gain = 0.0;
    Rng r2(2);
    CHECK(augment_audio(seg, zero_gain, r2).samples == seg.samples);

    // unit-power noise on silence: output power == gain^2 within 5%
    AudioSegment silence;
    silence.samples.assign(AudioSegment::kLength, 0.0f);
    AudioOps noise;
    noise.background_noise_gain = 0.1;
    double mean_power = 0.0;
    for (int s = 0; s < 10; ++s) {
        Rng r(100 + s);
        const AudioSegment out = augment_audio(silence, noise, r);
        double p = 0.0;
        for (float v : out.samples) p += static_cast<double>(v) * v;
        mean_power += p / out.samples.size();
    }
    mean_power /= 10.0;
    CHECK(mean_power == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("visual ops: identity, involution, pepper fraction, errors") {
    Rng seed_rng(19);
    const FrameStack stack = random_stack(seed_rng);

    VisualOps none;
    Rng r1(1);
    const FrameStack same = augment_visual(stack, none, r1);
    for (std::size_t i = 0; i < stack.values.size(); ++i)
        CHECK(same.values[i] == stack.values[i]);

    VisualOps flip;
    flip.horizontal_flip = true;
    Rng r2(2), r3(3);
    const FrameStack once = augment_visual(stack, flip, r2);
    const FrameStack twice = augment_visual(once, flip, r3);
    for (std::size_t i = 0; i < stack.values.size(); ++i)
        CHECK(twice.values[i] == stack.values[i]);

    VisualOps pepper;
    pepper.salt_pepper_p = 0.1;
    double changed = 0.0;
    for (int s = 0; s < 10; ++s) {
        Rng r(200 + s);
        const FrameStack out = augment_visual(stack, pepper, r);
        std::size_t diff = 0;
        const int hw = 112 * 112;
        for (int f = 0; f < 7; ++f)
            for (int i = 0; i < hw; ++i)
                if (out.values[static_cast<std::size_t>(f) * 3 * hw + i] !=
                    stack.values[static_cast<std::size_t>(f) * 3 * hw + i])
                    ++diff;
        changed += static_cast<double>(diff) / (7.0 * hw);
    }
    changed /= 10.0;
    CHECK(changed >= 0.08);
    CHECK(changed <= 0.12);

    VisualOps bad;
    bad.rotation_degrees = 200.0;
    Rng r4(4);
    CHECK_THROWS(augment_visual(stack, bad, r4));
}

TEST_CASE("per-sample streams make augmentation reproducible") {
    Rng seed_rng(23);
    MultiModalSample sample;
    sample.audio = random_audio(seed_rng);
    sample.video = random_stack(seed_rng);
    rf::IqSegment iq;
    iq.sample_rate = 16384.0;
    iq.samples.resize(rf::IqSegment::segment_length(iq.sample_rate));
    for (auto& v : iq.samples) v = {seed_rng.normal_f(), seed_rng.normal_f()};
    sample.rf = rf::stft_spectrogram(iq);

    AugmentationConfig cfg;
    cfg.seed = 42;
    cfg.audio = audio_ops_at_intensity(0.4);
    cfg.visual = visual_ops_at_intensity(0.4);
    cfg.rf = {5.0, 10.0, true};

    const MultiModalSample a = augment_sample(sample, iq, cfg, "s1");
    const MultiModalSample b = augment_sample(sample, iq, cfg, "s1");
    CHECK(a.audio.samples == b.audio.samples);
    for (std::size_t i = 0; i < a.video.values.size(); ++i)
        CHECK(a.video.values[i] == b.video.values[i]);
    for (std::size_t i = 0; i < a.rf.values.size(); ++i)
        CHECK(a.rf.values[i] == b.rf.values[i]);

    // a different sample id gives a different stream
    const MultiModalSample c = augment_sample(sample, iq, cfg, "s2");
    CHECK(c.audio.samples != a.audio.samples);
}

TEST_CASE("distortion grows monotonically with intensity") {
    Rng seed_rng(29);
    const AudioSegment seg = random_audio(seed_rng);
    const FrameStack stack = random_stack(seed_rng);
    const audio::MfccConfig mfcc_cfg;
    const MfccGrid clean = audio::mfcc_extract(seg, mfcc_cfg);

    double prev_mcd = -1.0, prev_ssim = 2.0;
    for (int step = 0; step <= 10; ++step) {
        const double intensity = step / 10.0;
        Rng ra(500), rv(501);  // same stream per step
        const AudioSegment aug =
            augment_audio(seg, audio_ops_at_intensity(intensity), ra);
        const double mcd = compute_mcd(clean, audio::mfcc_extract(aug, mfcc_cfg));
        const double ssim = compute_ssim(
            stack, augment_visual(stack, visual_ops_at_intensity(intensity), rv));
        if (step > 0) {
            CHECK(mcd > prev_mcd);
            CHECK(ssim < prev_ssim);
        }
        prev_mcd = mcd;
        prev_ssim = ssim;
    }
}

TEST_CASE("scenario presets carry the published targets") {
    const ScenarioPreset low = low_noise_preset();
    CHECK(low.target_mcd_db == doctest::Approx(3.54));
    CHECK(low.target_ssim == doctest::Approx(0.9597));
    CHECK(low.snr_min_db == 15.0);
    CHECK(low.snr_max_db == 20.0);
    const ScenarioPreset high = high_noise_preset();
    CHECK(high.target_mcd_db == doctest::Approx(11.82));
    CHECK(high.target_ssim == doctest::Approx(0.7271));
    CHECK(high.snr_min_db == 5.0);
    CHECK(high.snr_max_db == 10.0);
    CHECK_THROWS(preset_by_name("medium"));
}

TEST_CASE("zero-intensity configs are the identity on probes") {
    const AudioOps a = audio_ops_at_intensity(0.0);
    CHECK(a.background_noise_gain == 0.0);
    const VisualOps v = visual_ops_at_intensity(0.0);
    CHECK(v.noise_sigma == 0.0);
    CHECK(v.blur_sigma == 0.0);

    Rng rng(31);
    const AudioSegment seg = random_audio(rng);
    const FrameStack stack = random_stack(rng);
    Rng ra(1), rv(2);
    const MfccGrid clean = audio::mfcc_extract(seg, {});
    const MfccGrid after =
        audio::mfcc_extract(augment_audio(seg, a, ra), {});
    CHECK(compute_mcd(clean, after) == doctest::Approx(0.0));
    CHECK(compute_ssim(stack, augment_visual(stack, v, rv)) ==
          doctest::Approx(1.0));
}

TEST_CASE("calibration requires at least 20 probes") {
    std::vector<MultiModalSample> probes(5);
    CHECK_THROWS(calibrate_scenario(low_noise_preset(), probes, 1));
}

TEST_SUITE_END();
