#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "phq/audio.hpp"
#include "phq/errors.hpp"

using namespace phq;
namespace tu = testutil;

TEST_CASE("pcm16 decode scales linearly") {
    tu::TempDir dir("audio");
    tu::write_file(dir / "const.wav",
                   tu::wav_bytes_pcm16(std::vector<int16_t>(1600, 16384), 16000, 1));
    const AudioClip clip = load_wav(dir / "const.wav");
    REQUIRE(clip.size() == 1600);
    CHECK(clip.sample_rate == 16000);
    for (double s : clip.samples) CHECK(std::abs(s - 0.5) <= std::pow(2.0, -15));
}

TEST_CASE("stereo downmix averages channels") {
    tu::TempDir dir("audio");
    // +0.2 / -0.2 as int16: symmetric values cancel exactly
    std::vector<int16_t> interleaved;
    for (int i = 0; i < 500; ++i) {
        interleaved.push_back(6554);
        interleaved.push_back(-6554);
    }
    tu::write_file(dir / "stereo.wav", tu::wav_bytes_pcm16(interleaved, 8000, 2));
    const AudioClip clip = load_wav(dir / "stereo.wav");
    REQUIRE(clip.size() == 500);
    for (double s : clip.samples) CHECK(s == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("float32 samples decode bit-exactly") {
    tu::TempDir dir("audio");
    const std::vector<float> vals = {0.0f, 0.25f, -0.75f, 1.0f, -1.0f, 0.123456f};
    tu::write_file(dir / "f32.wav", tu::wav_bytes_f32(vals, 44100, 1));
    const AudioClip clip = load_wav(dir / "f32.wav");
    REQUIRE(clip.size() == vals.size());
    CHECK(clip.sample_rate == 44100);
    for (size_t i = 0; i < vals.size(); ++i) CHECK(clip.samples[i] == double(vals[i]));
}

TEST_CASE("sine written by the independent writer survives decode") {
    tu::TempDir dir("audio");
    std::vector<int16_t> pcm;
    for (double s : tu::sine(440.0, 1.0, 16000, 0.8)) pcm.push_back(int16_t(std::lround(s * 32767)));
    tu::write_file(dir / "sine.wav", tu::wav_bytes_pcm16(pcm, 16000, 1));
    const AudioClip clip = load_wav(dir / "sine.wav");
    REQUIRE(clip.size() == 16000);
    double peak = 0.0;
    for (double s : clip.samples) peak = std::max(peak, std::abs(s));
    CHECK(peak == doctest::Approx(0.8).epsilon(0.01));
}

TEST_CASE("malformed and unsupported files are rejected") {
    tu::TempDir dir("audio");

    tu::write_file(dir / "trunc.wav",
                   tu::wav_bytes_pcm16(std::vector<int16_t>(100, 5), 8000, 1).substr(0, 30));
    CHECK_THROWS_AS(load_wav(dir / "trunc.wav"), DecodeError);

    tu::write_file(dir / "notriff.wav", "JUNKJUNKJUNKJUNKJUNKJUNKJUNKJUNKJUNKJUNK");
    CHECK_THROWS_AS(load_wav(dir / "notriff.wav"), DecodeError);

    // μ-law format code
    tu::write_file(dir / "mulaw.wav", tu::riff_container(7, 1, 8000, 1, std::string(80, 'x')));
    CHECK_THROWS_AS(load_wav(dir / "mulaw.wav"), UnsupportedFormatError);

    tu::write_file(dir / "empty.wav", tu::wav_bytes_pcm16({}, 8000, 1));
    CHECK_THROWS_AS(load_wav(dir / "empty.wav"), EmptyInputError);

    CHECK_THROWS_AS(load_wav(dir / "missing.wav"), DecodeError);
}

TEST_CASE("pcm16 write then load is exact") {
    tu::TempDir dir("audio");
    AudioClip clip;
    clip.sample_rate = 16000;
    for (int16_t v : {int16_t(0), int16_t(1), int16_t(-1), int16_t(32767), int16_t(-32768),
                      int16_t(12345), int16_t(-20000)})
        clip.samples.push_back(double(v) / 32768.0);
    write_wav(dir / "rt.wav", clip);
    const AudioClip back = load_wav(dir / "rt.wav");
    REQUIRE(back.size() == clip.size());
    for (size_t i = 0; i < clip.size(); ++i) CHECK(back.samples[i] == clip.samples[i]);
}

TEST_CASE("normalize_dbfs hits the target RMS") {
    AudioClip clip;
    clip.sample_rate = 16000;
    clip.samples = tu::sine(440.0, 1.0, 16000, 1.0); // RMS 1/sqrt(2)

    const AudioClip out = normalize_dbfs(clip, -20.0);
    CHECK(rms(out.samples) == doctest::Approx(0.1).epsilon(1e-6));

    SUBCASE("idempotent absent clipping") {
        const AudioClip out2 = normalize_dbfs(out, -20.0);
        double diff = 0.0;
        for (size_t i = 0; i < out.size(); ++i) {
            const double d = out2.samples[i] - out.samples[i];
            diff += d * d;
        }
        CHECK(std::sqrt(diff / double(out.size())) < 1e-9);
    }

    SUBCASE("clip already at target passes through") {
        AudioClip at_target;
        at_target.sample_rate = 16000;
        at_target.samples = tu::sine(300.0, 0.5, 16000, 0.1 * std::sqrt(2.0));
        const AudioClip same = normalize_dbfs(at_target, -20.0);
        for (size_t i = 0; i < same.size(); ++i)
            CHECK(std::abs(same.samples[i] - at_target.samples[i]) < 1e-9);
    }
}

TEST_CASE("normalize_dbfs peak-limits and reports clipping") {
    AudioClip clip;
    clip.sample_rate = 8000;
    // One dominant spike: raising the tiny RMS to 0 dBFS would push it past 1.
    clip.samples.assign(8000, 0.001);
    clip.samples[10] = 0.9;
    bool clipped = false;
    const AudioClip out = normalize_dbfs(clip, 0.0, &clipped);
    CHECK(clipped);
    for (double s : out.samples) {
        CHECK(s <= 1.0);
        CHECK(s >= -1.0);
    }
}

TEST_CASE("silence cannot be normalized") {
    AudioClip clip;
    clip.sample_rate = 8000;
    clip.samples.assign(800, 0.0);
    CHECK_THROWS_AS(normalize_dbfs(clip, -20.0), DataError);
}
