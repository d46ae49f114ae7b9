#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>
#include <random>
#include <set>

#include "helpers.hpp"
#include "phq/errors.hpp"
#include "phq/features.hpp"

using namespace phq;
namespace tu = testutil;

namespace {

AudioClip make_clip(std::vector<double> samples, int sr = 16000) {
    AudioClip c;
    c.samples = std::move(samples);
    c.sample_rate = sr;
    return c;
}

// Test-side MFCC chain with a naive O(n^2) DFT. Same formula chain, no shared
// code with the library path.
std::vector<std::vector<double>> naive_mfcc(const AudioClip& clip, const FeatureConfig& cfg) {
    std::vector<double> x = clip.samples;
    for (size_t i = x.size(); i-- > 1;) x[i] -= cfg.preemphasis * x[i - 1];
    x[0] -= cfg.preemphasis * x[0];

    const size_t L = size_t(std::lround(cfg.frame_ms * clip.sample_rate / 1000.0));
    const size_t H = size_t(std::lround(cfg.hop_ms * clip.sample_rate / 1000.0));
    const size_t n_frames = (x.size() - L) / H + 1;
    size_t nfft = 1;
    while (nfft < L) nfft *= 2;
    const size_t n_bins = nfft / 2 + 1;

    std::vector<double> win(L);
    for (size_t i = 0; i < L; ++i)
        win[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(L - 1));

    auto mel = [](double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); };
    const double mel_max = mel(clip.sample_rate / 2.0);
    const int M = cfg.n_mels;
    std::vector<double> pts(M + 2);
    for (int j = 0; j < M + 2; ++j) pts[j] = mel_max * double(j) / double(M + 1);

    std::vector<std::vector<double>> out(n_frames, std::vector<double>(cfg.n_mfcc));
    std::vector<double> frame(L), power(n_bins), log_mel(M);
    for (size_t t = 0; t < n_frames; ++t) {
        for (size_t i = 0; i < L; ++i) frame[i] = x[t * H + i] * win[i];
        for (size_t k = 0; k < n_bins; ++k) {
            std::complex<double> acc = 0.0;
            for (size_t i = 0; i < L; ++i) {
                const double ang = -2.0 * std::numbers::pi * double(k) * double(i) / double(nfft);
                acc += frame[i] * std::complex<double>(std::cos(ang), std::sin(ang));
            }
            power[k] = std::norm(acc) / double(nfft);
        }
        for (int j = 0; j < M; ++j) {
            double e = 0.0;
            for (size_t k = 0; k < n_bins; ++k) {
                const double mk = mel(double(k) * clip.sample_rate / double(nfft));
                const double lo = pts[j], mid = pts[j + 1], hi = pts[j + 2];
                if (mk <= lo || mk >= hi) continue;
                const double w = mk <= mid ? (mk - lo) / (mid - lo) : (hi - mk) / (hi - mid);
                e += w * power[k];
            }
            log_mel[j] = std::log(std::max(e, cfg.log_floor));
        }
        for (int i = 0; i < cfg.n_mfcc; ++i) {
            const double scale = std::sqrt((i == 0 ? 1.0 : 2.0) / M);
            double c = 0.0;
            for (int j = 0; j < M; ++j)
                c += scale * std::cos(std::numbers::pi * i * (2.0 * j + 1.0) / (2.0 * M)) *
                     log_mel[j];
            out[t][i] = c;
        }
    }
    return out;
}

// Replicate-padded regression delta, written independently of the library.
std::vector<double> naive_delta(const std::vector<double>& v, int w) {
    const long n = long(v.size());
    double denom = 0.0;
    for (int k = 1; k <= w; ++k) denom += 2.0 * k * k;
    std::vector<double> out(v.size());
    for (long t = 0; t < n; ++t) {
        double acc = 0.0;
        for (int k = 1; k <= w; ++k)
            acc += k * (v[size_t(std::clamp(t + k, 0L, n - 1))] -
                        v[size_t(std::clamp(t - k, 0L, n - 1))]);
        out[size_t(t)] = acc / denom;
    }
    return out;
}

std::vector<double> harmonic_vowel(double f0, double seconds, int sr, double amp) {
    const double rel[] = {1.0, 0.5, 0.25, 0.12};
    std::vector<double> v(size_t(seconds * sr), 0.0);
    for (size_t i = 0; i < v.size(); ++i)
        for (int h = 0; h < 4; ++h)
            v[i] += rel[h] * std::sin(2.0 * std::numbers::pi * f0 * (h + 1) * double(i) / sr);
    double peak = 0.0;
    for (double s : v) peak = std::max(peak, std::abs(s));
    for (double& s : v) s *= amp / peak;
    return v;
}

// Tone whose frequency switches at each waveform peak, so every peak-to-peak
// interval is one whole cycle at f0 / period_scale[i].
std::vector<double> jitter_tone(int sr, double f0, const std::vector<double>& period_scale) {
    std::vector<double> out;
    double phase = 0.0;
    size_t seg = 0;
    double f = f0 / period_scale[0];
    while (true) {
        out.push_back(0.4 * std::sin(phase));
        phase += 2.0 * std::numbers::pi * f / sr;
        const double half_pi = std::numbers::pi / 2.0;
        const size_t s =
            phase < half_pi ? 0 : size_t((phase - half_pi) / (2.0 * std::numbers::pi)) + 1;
        if (s >= period_scale.size()) break;
        if (s != seg) {
            seg = s;
            f = f0 / period_scale[seg];
        }
    }
    return out;
}

// Per-cycle amplitude, switched at upward zero crossings (waveform continuous).
std::vector<double> shimmer_tone(int sr, double f0, const std::vector<double>& cycle_amp) {
    std::vector<double> out;
    double phase = 0.0;
    while (true) {
        const size_t cyc = size_t(phase / (2.0 * std::numbers::pi));
        if (cyc >= cycle_amp.size()) break;
        out.push_back(cycle_amp[cyc] * std::sin(phase));
        phase += 2.0 * std::numbers::pi * f0 / sr;
    }
    return out;
}

FrameTrack track_of(std::vector<double> values) {
    FrameTrack t;
    t.descriptor = "x";
    t.values = std::move(values);
    t.present.assign(t.values.size(), 1);
    return t;
}

double entry(const FeatureVector& fv, const FeatureManifest& m, const std::string& name) {
    const int i = m.index_of(name);
    REQUIRE(i >= 0);
    return fv.values[size_t(i)];
}

} // namespace

TEST_CASE("framing arithmetic and window shape") {
    const int sr = 16000;
    CHECK(frame_length_samples(25.0, sr) == 400);

    auto frames = frame_signal(make_clip(tu::white_noise(400, 0.1, 1), sr), 25.0, 10.0,
                               WindowType::Rectangular);
    CHECK(frames.size() == 1);
    frames = frame_signal(make_clip(tu::white_noise(560, 0.1, 2), sr), 25.0, 10.0,
                          WindowType::Rectangular);
    CHECK(frames.size() == 2);
    CHECK(frames[0].size() == 400);

    // Hann on constant-1 input reproduces the window itself
    frames = frame_signal(make_clip(std::vector<double>(400, 1.0), sr), 25.0, 10.0,
                          WindowType::Hann);
    REQUIRE(frames.size() == 1);
    CHECK(frames[0][0] == 0.0);
    CHECK(frames[0][399] == doctest::Approx(0.0).epsilon(1e-12));
    for (size_t i = 0; i < 400; ++i) {
        const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / 399.0);
        CHECK(std::abs(frames[0][i] - w) < 1e-12);
    }

    CHECK_THROWS_AS(frame_signal(make_clip(std::vector<double>(399, 0.1), sr), 25.0, 10.0,
                                 WindowType::Rectangular),
                    InsufficientAudioError);
}

TEST_CASE("mfcc matches a naive reference chain") {
    auto samples = tu::white_noise(2400, 0.1, 11);
    const auto tone = tu::sine(300.0, 0.15, 16000, 0.3);
    for (size_t i = 0; i < samples.size(); ++i) samples[i] += tone[i];
    const AudioClip clip = make_clip(std::move(samples));

    const FeatureConfig cfg;
    const auto tracks = mfcc_tracks(clip, cfg);
    const auto ref = naive_mfcc(clip, cfg);

    REQUIRE(tracks.size() == 13);
    REQUIRE(tracks[0].count() == ref.size());
    double worst = 0.0;
    for (size_t t = 0; t < ref.size(); ++t)
        for (int i = 0; i < 13; ++i)
            worst = std::max(worst, std::abs(tracks[size_t(i)].values[t] - ref[t][size_t(i)]));
    CHECK(worst < 1e-9);
}

TEST_CASE("mfcc on digital silence is constant") {
    const auto tracks = mfcc_tracks(make_clip(std::vector<double>(8000, 0.0)));
    for (int i = 1; i < 13; ++i) {
        const auto var = apply_functional(tracks[size_t(i)], Functional::Var);
        REQUIRE(var.defined);
        CHECK(var.value == 0.0);
    }
}

TEST_CASE("mfcc1 separates white noise from a 300 Hz tone") {
    const auto noise = mfcc_tracks(make_clip(tu::white_noise(16000, 0.3, 5)));
    const auto tone = mfcc_tracks(make_clip(tu::sine(300.0, 1.0, 16000, 0.3)));
    const double m_noise = apply_functional(noise[1], Functional::Mean).value;
    const double m_tone = apply_functional(tone[1], Functional::Mean).value;
    CHECK(std::abs(m_noise - m_tone) > 0.5);
}

TEST_CASE("mfcc means are stable under a one-hop shift of stationary noise") {
    const auto noise = tu::white_noise(320000, 0.3, 21); // 20 s
    const AudioClip full = make_clip(noise);
    const AudioClip shifted =
        make_clip(std::vector<double>(noise.begin() + 160, noise.end()));

    const auto a = mfcc_tracks(full);
    const auto b = mfcc_tracks(shifted);
    for (int i = 0; i < 13; ++i) {
        const double ma = apply_functional(a[size_t(i)], Functional::Mean).value;
        const double mb = apply_functional(b[size_t(i)], Functional::Mean).value;
        CHECK(std::abs(ma - mb) < 1e-3);
    }
}

TEST_CASE("delta of constant and ramp tracks") {
    const FrameTrack constant = track_of(std::vector<double>(30, 4.2));
    const auto d0 = delta_track(constant, 1);
    for (double v : d0.values) CHECK(std::abs(v) < 1e-15);

    std::vector<double> ramp(40);
    for (size_t i = 0; i < ramp.size(); ++i) ramp[i] = 0.7 * double(i) - 3.0;
    const auto d1 = delta_track(track_of(ramp), 1);
    for (size_t t = 2; t + 2 < d1.count(); ++t)
        CHECK(d1.values[t] == doctest::Approx(0.7).epsilon(1e-12));

    const auto d2 = delta_track(track_of(ramp), 2);
    for (size_t t = 4; t + 4 < d2.count(); ++t) CHECK(std::abs(d2.values[t]) < 1e-12);
}

TEST_CASE("delta matches the replicate-padding oracle everywhere") {
    const auto v = tu::white_noise(50, 1.0, 33);
    const auto got1 = delta_track(track_of(v), 1);
    const auto ref1 = naive_delta(v, 2);
    for (size_t t = 0; t < v.size(); ++t) CHECK(std::abs(got1.values[t] - ref1[t]) < 1e-12);

    const auto got2 = delta_track(track_of(v), 2);
    const auto ref2 = naive_delta(ref1, 2);
    for (size_t t = 0; t < v.size(); ++t) CHECK(std::abs(got2.values[t] - ref2[t]) < 1e-12);

    CHECK(got2.descriptor == "ddx");
    CHECK_THROWS_AS(delta_track(track_of({1.0, 2.0, 3.0, 4.0}), 1), InsufficientDataError);
}

TEST_CASE("zcr of a sine tracks 2f/sr") {
    const auto zcr = zcr_track(make_clip(tu::sine(440.0, 0.5, 16000, 0.3)));
    const double expected = 2.0 * 440.0 / 16000.0;
    for (double v : zcr.values) {
        CHECK(v > expected * 0.9);
        CHECK(v < expected * 1.1);
    }
    const auto flat = zcr_track(make_clip(std::vector<double>(4000, 0.5)));
    for (double v : flat.values) CHECK(v == 0.0);
}

TEST_CASE("intensity of a full-scale square wave is 0 dB") {
    std::vector<double> sq(2400);
    for (size_t i = 0; i < sq.size(); ++i) sq[i] = (i / 20) % 2 == 0 ? 1.0 : -1.0;
    const auto track = intensity_track(make_clip(sq));
    for (double v : track.values) CHECK(std::abs(v) < 1e-9);

    const auto quiet = intensity_track(make_clip(std::vector<double>(2400, 0.1)));
    for (double v : quiet.values) CHECK(v == doctest::Approx(-20.0).epsilon(1e-9));
}

TEST_CASE("f0 recovers a 220 Hz tone") {
    const auto f0 = f0_track(make_clip(tu::sine(220.0, 1.0, 16000, 0.3)));
    REQUIRE(f0.present_count() > 0);
    CHECK(double(f0.present_count()) / double(f0.count()) > 0.9);
    for (size_t t = 0; t < f0.count(); ++t) {
        if (!f0.present[t]) continue;
        CHECK(f0.values[t] > 219.0);
        CHECK(f0.values[t] < 221.0);
    }
}

TEST_CASE("white noise is mostly unvoiced") {
    const auto f0 = f0_track(make_clip(tu::white_noise(32000, 0.3, 17)));
    CHECK(double(f0.present_count()) <= 0.1 * double(f0.count()));
}

TEST_CASE("pulse train pitch avoids octave errors") {
    // 100 Hz train of raised-cosine bumps, glottal-ish
    const int sr = 16000;
    std::vector<double> v(sr, 0.0);
    for (size_t start = 0; start + 40 < v.size(); start += 160)
        for (size_t i = 0; i < 40; ++i)
            v[start + i] =
                0.5 * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / 39.0));
    const auto f0 = f0_track(make_clip(v, sr));
    REQUIRE(f0.present_count() > 0);
    for (size_t t = 0; t < f0.count(); ++t) {
        if (!f0.present[t]) continue;
        CHECK(f0.values[t] > 95.0);
        CHECK(f0.values[t] < 105.0);
    }
}

TEST_CASE("hnr of a pure tone is high") {
    const auto hnr = hnr_track(make_clip(tu::sine(200.0, 1.0, 16000, 0.3)));
    REQUIRE(hnr.present_count() > 0);
    for (size_t t = 0; t < hnr.count(); ++t)
        if (hnr.present[t]) CHECK(hnr.values[t] >= 30.0);
}

TEST_CASE("hnr of an equal-power mixture sits near 0 dB") {
    const auto tone = tu::sine(200.0, 2.0, 16000, 0.4);
    auto noise = tu::white_noise(tone.size(), 1.0, 51);
    const double target = tu::rms_of(tone);
    const double scale = target / tu::rms_of(noise);
    std::vector<double> mix(tone.size());
    for (size_t i = 0; i < mix.size(); ++i) mix[i] = tone[i] + noise[i] * scale;

    const auto hnr = hnr_track(make_clip(mix));
    REQUIRE(hnr.present_count() > 10);
    double mean = 0.0;
    for (double v : hnr.present_values()) mean += v;
    mean /= double(hnr.present_count());
    CHECK(std::abs(mean) <= 2.0);
}

TEST_CASE("hnr of white noise stays low on any voiced frame") {
    const auto hnr = hnr_track(make_clip(tu::white_noise(32000, 0.3, 29)));
    for (size_t t = 0; t < hnr.count(); ++t)
        if (hnr.present[t]) CHECK(hnr.values[t] < 5.0);
}

TEST_CASE("jitter and shimmer of a perfectly periodic vowel are tiny") {
    const AudioClip clip = make_clip(harmonic_vowel(150.0, 1.5, 16000, 0.5));
    const auto f0 = f0_track(clip);
    const auto js = jitter_shimmer(clip, f0);
    REQUIRE(js.defined);
    CHECK(js.n_periods > 100);
    CHECK(js.jitter_local < 0.002);
    CHECK(js.shimmer_local < 0.002);
}

TEST_CASE("2 percent period perturbation lands in the expected jitter band") {
    std::mt19937_64 eng(77);
    std::vector<double> scale(220);
    for (auto& s : scale)
        s = 1.0 + 0.02 * (2.0 * ((eng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0);
    const AudioClip clip = make_clip(jitter_tone(16000, 150.0, scale));

    const auto js = jitter_shimmer(clip, f0_track(clip));
    REQUIRE(js.defined);
    CHECK(js.jitter_local >= 0.01);
    CHECK(js.jitter_local <= 0.03);
}

TEST_CASE("alternating 5 percent amplitude shows up as shimmer") {
    std::vector<double> amp(300);
    for (size_t i = 0; i < amp.size(); ++i) amp[i] = i % 2 == 0 ? 0.35 : 0.35 * 1.05;
    const AudioClip clip = make_clip(shimmer_tone(16000, 150.0, amp));

    const auto js = jitter_shimmer(clip, f0_track(clip));
    REQUIRE(js.defined);
    const double expected = 0.05 / 1.025;
    CHECK(js.shimmer_local > expected * 0.7);
    CHECK(js.shimmer_local < expected * 1.3);
}

TEST_CASE("jitter is undefined without voiced periods") {
    const AudioClip clip = make_clip(tu::white_noise(16000, 0.3, 61));
    const auto js = jitter_shimmer(clip, f0_track(clip));
    CHECK_FALSE(js.defined);
    CHECK(js.jitter_local == 0.0);
    CHECK(js.shimmer_local == 0.0);
}

TEST_CASE("pause timeline") {
    const int sr = 16000;

    SUBCASE("continuous tone has no pauses") {
        const auto p = pause_features(make_clip(tu::sine(200.0, 1.5, sr, 0.3)));
        CHECK(p.pause_count == 0);
        CHECK(p.phonation_rate == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("tone, half-second gap, tone") {
        auto v = tu::sine(200.0, 1.0, sr, 0.3);
        v.resize(v.size() + size_t(0.5 * sr), 0.0);
        const auto tail = tu::sine(200.0, 1.0, sr, 0.3);
        v.insert(v.end(), tail.begin(), tail.end());

        const auto p = pause_features(make_clip(v));
        CHECK(p.pause_count == 1);
        CHECK(std::abs(p.mean_pause_s - 0.5) <= 0.035);
        CHECK(p.speech_dur_s == doctest::Approx(p.total_dur_s - p.mean_pause_s).epsilon(1e-9));
        CHECK(p.phonation_rate > 0.7);
        CHECK(p.phonation_rate < 0.9);
    }

    SUBCASE("all silence") {
        const auto p = pause_features(make_clip(std::vector<double>(sr, 0.0)));
        CHECK(p.speech_dur_s == 0.0);
        CHECK(p.phonation_rate == 0.0);
        CHECK(p.pause_count == 1);
    }

    SUBCASE("gap shorter than min_pause does not count") {
        auto v = tu::sine(200.0, 0.8, sr, 0.3);
        v.resize(v.size() + size_t(0.15 * sr), 0.0);
        const auto tail = tu::sine(200.0, 0.8, sr, 0.3);
        v.insert(v.end(), tail.begin(), tail.end());
        const auto p = pause_features(make_clip(v));
        CHECK(p.pause_count == 0);
    }
}

TEST_CASE("time reversal preserves zcr and pauses") {
    const int sr = 16000;
    auto v = tu::sine(330.0, 1.0, sr, 0.3);
    v.resize(v.size() + size_t(0.5 * sr), 0.0);
    const auto tail = tu::sine(330.0, 1.0, sr, 0.3);
    v.insert(v.end(), tail.begin(), tail.end());
    std::vector<double> rev(v.rbegin(), v.rend());

    const auto pf = pause_features(make_clip(v));
    const auto pr = pause_features(make_clip(rev));
    CHECK(pf.pause_count == pr.pause_count);
    CHECK(std::abs(pf.mean_pause_s - pr.mean_pause_s) <= 0.035);

    const double zf = apply_functional(zcr_track(make_clip(v)), Functional::Mean).value;
    const double zr = apply_functional(zcr_track(make_clip(rev)), Functional::Mean).value;
    CHECK(std::abs(zf - zr) < 2e-3);
}

TEST_CASE("functionals against hand-computed moments") {
    const auto t = track_of({1.0, 2.0, 3.0, 4.0});
    CHECK(apply_functional(t, Functional::Min).value == 1.0);
    CHECK(apply_functional(t, Functional::Max).value == 4.0);
    CHECK(apply_functional(t, Functional::Mean).value == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(apply_functional(t, Functional::Var).value == doctest::Approx(1.25).epsilon(1e-12));
    // m4 = 2.5625, m2 = 1.25 -> excess kurtosis 2.5625/1.5625 - 3
    CHECK(apply_functional(t, Functional::Kurt).value ==
          doctest::Approx(2.5625 / 1.5625 - 3.0).epsilon(1e-12));

    const auto sym = track_of({-1.0, 0.0, 1.0});
    CHECK(std::abs(apply_functional(sym, Functional::Skew).value) < 1e-12);
    CHECK(apply_functional(sym, Functional::Kurt).value ==
          doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("functionals handle degenerate tracks") {
    const auto constant = track_of({5.0, 5.0, 5.0});
    auto var = apply_functional(constant, Functional::Var);
    CHECK(var.defined);
    CHECK(var.value == 0.0);
    CHECK_FALSE(apply_functional(constant, Functional::Skew).defined);
    CHECK_FALSE(apply_functional(constant, Functional::Kurt).defined);

    FrameTrack empty;
    CHECK_FALSE(apply_functional(empty, Functional::Mean).defined);
    CHECK(apply_functional(empty, Functional::Mean).value == 0.0);

    const auto single = track_of({3.0});
    CHECK(apply_functional(single, Functional::Min).defined);
    CHECK_FALSE(apply_functional(single, Functional::Var).defined);

    const auto pair = track_of({0.0, 1.0});
    CHECK(apply_functional(pair, Functional::Var).value ==
          doctest::Approx(0.25).epsilon(1e-12));
    CHECK_FALSE(apply_functional(pair, Functional::Skew).defined);
}

TEST_CASE("functionals skip absent frames") {
    FrameTrack t = track_of({10.0, 1.0, 2.0, 3.0, 4.0, 99.0});
    t.present = {0, 1, 1, 1, 1, 0};
    CHECK(apply_functional(t, Functional::Mean).value == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(apply_functional(t, Functional::Var).value == doctest::Approx(1.25).epsilon(1e-12));
    CHECK(apply_functional(t, Functional::Max).value == 4.0);
}

TEST_CASE("manifest v1 layout") {
    const auto m = FeatureManifest::v1();
    CHECK(m.version == "v1");
    CHECK(m.size() == 158);
    CHECK(m.entries.front() == "MFCC0_min");
    CHECK(m.entries.back() == "voiced_fraction");
    CHECK(std::set<std::string>(m.entries.begin(), m.entries.end()).size() == 158);
    CHECK(m.index_of("F0_mean") >= 0);
    CHECK(m.index_of("dMFCC7_skew") >= 0);
    CHECK(m.index_of("no_such_feature") == -1);
}

TEST_CASE("manifest file round-trip and parse errors") {
    tu::TempDir dir("manifest");
    const auto path = dir.path() / "manifest.txt";

    const auto m = FeatureManifest::v1();
    m.save(path);
    const auto loaded = FeatureManifest::load(path);
    CHECK(loaded.version == m.version);
    CHECK(loaded.entries == m.entries);

    tu::write_file(dir.path() / "noheader.txt", "a\nb\n");
    CHECK_THROWS_AS(FeatureManifest::load(dir.path() / "noheader.txt"), FormatError);
    tu::write_file(dir.path() / "dup.txt", "# manifest_version: v9\na\nb\na\n");
    CHECK_THROWS_AS(FeatureManifest::load(dir.path() / "dup.txt"), FormatError);
    tu::write_file(dir.path() / "empty.txt", "# manifest_version: v9\n");
    CHECK_THROWS_AS(FeatureManifest::load(dir.path() / "empty.txt"), FormatError);
}

TEST_CASE("extract_conventional fills the whole manifest deterministically") {
    const auto manifest = FeatureManifest::v1();
    auto samples = harmonic_vowel(220.0, 2.0, 16000, 0.4);
    const auto noise = tu::white_noise(samples.size(), 0.002, 3);
    for (size_t i = 0; i < samples.size(); ++i) samples[i] += noise[i];
    const AudioClip clip = make_clip(samples);

    const auto fv = extract_conventional(clip, manifest);
    REQUIRE(fv.values.size() == manifest.size());
    CHECK(fv.manifest_id == "v1");
    for (double v : fv.values) CHECK(std::isfinite(v));

    CHECK(entry(fv, manifest, "F0_mean") > 219.0);
    CHECK(entry(fv, manifest, "F0_mean") < 221.0);
    CHECK(entry(fv, manifest, "voiced_fraction") > 0.9);
    CHECK(entry(fv, manifest, "phonation_rate") == doctest::Approx(1.0).epsilon(1e-12));

    const auto again = extract_conventional(clip, manifest);
    CHECK(std::memcmp(fv.values.data(), again.values.data(),
                      fv.values.size() * sizeof(double)) == 0);
    CHECK(fv.flags == again.flags);

    // different durations, same shape
    const auto shorter = extract_conventional(
        make_clip(harmonic_vowel(220.0, 0.9, 16000, 0.4)), manifest);
    CHECK(shorter.values.size() == manifest.size());
}

TEST_CASE("undefined measures are imputed and flagged") {
    const auto manifest = FeatureManifest::v1();
    const auto fv =
        extract_conventional(make_clip(tu::white_noise(24000, 0.3, 13)), manifest);
    CHECK(std::find(fv.flags.begin(), fv.flags.end(), "jitter_local") != fv.flags.end());
    CHECK(entry(fv, manifest, "jitter_local") == 0.0);
    CHECK(entry(fv, manifest, "shimmer_local") == 0.0);
    for (double v : fv.values) CHECK(std::isfinite(v));
}

TEST_CASE("extract_conventional propagates insufficient audio") {
    const auto manifest = FeatureManifest::v1();
    CHECK_THROWS_AS(
        extract_conventional(make_clip(tu::sine(200.0, 0.03, 16000, 0.3)), manifest),
        InsufficientAudioError);
}

TEST_CASE("doubling amplitude moves only intensity") {
    const auto manifest = FeatureManifest::v1();
    const auto base = harmonic_vowel(180.0, 1.5, 16000, 0.3);
    std::vector<double> loud(base.size());
    for (size_t i = 0; i < base.size(); ++i) loud[i] = 2.0 * base[i];

    const auto a = extract_conventional(make_clip(base), manifest);
    const auto b = extract_conventional(make_clip(loud), manifest);

    for (const char* name : {"F0_mean", "ZCR_mean", "jitter_local", "phonation_rate"})
        CHECK(std::abs(entry(a, manifest, name) - entry(b, manifest, name)) < 1e-6);
    const double gain = entry(b, manifest, "intensity_mean") - entry(a, manifest, "intensity_mean");
    CHECK(std::abs(gain - 20.0 * std::log10(2.0)) < 0.1);
}

TEST_CASE("self-concatenation keeps mean functionals") {
    const auto manifest = FeatureManifest::v1();
    const auto v = harmonic_vowel(200.0, 2.0, 16000, 0.4); // whole cycles: seamless junction
    std::vector<double> twice = v;
    twice.insert(twice.end(), v.begin(), v.end());

    const auto a = extract_conventional(make_clip(v), manifest);
    const auto b = extract_conventional(make_clip(twice), manifest);
    for (size_t i = 0; i < manifest.size(); ++i) {
        const auto& name = manifest.entries[i];
        if (name.size() < 5 || name.substr(name.size() - 5) != "_mean") continue;
        CHECK(std::abs(a.values[i] - b.values[i]) < 1e-3);
    }
}
