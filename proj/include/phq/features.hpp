#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "phq/types.hpp"

namespace phq {

enum class WindowType { Rectangular, Hann };

// One value per analysis frame; `present` marks frames where the descriptor
// is defined (F0/HNR are absent on unvoiced frames).
struct FrameTrack {
    std::string descriptor;
    double frame_len_ms = 0.0;
    double frame_hop_ms = 0.0;
    std::vector<double> values;
    std::vector<uint8_t> present;

    size_t count() const { return values.size(); }
    size_t present_count() const;
    std::vector<double> present_values() const;
};

// Frame-level analysis parameters. Defaults are fixed so extraction is
// reproducible; every field is surfaced in the pipeline config.
struct FeatureConfig {
    double frame_ms = 25.0;
    double hop_ms = 10.0;
    double pitch_frame_ms = 40.0;
    double preemphasis = 0.97;
    int n_mels = 26;
    int n_mfcc = 13;
    double log_floor = 1e-10;
    double voicing_threshold = 0.45; // on the normalized autocorrelation peak
    double f0_min_hz = 75.0;
    double f0_max_hz = 500.0;
    double silence_dbfs = -40.0;
    double min_pause_ms = 250.0;
    int delta_window = 2;
};

size_t frame_length_samples(double frame_ms, int sample_rate);
std::vector<std::vector<double>> frame_signal(const AudioClip& clip, double frame_ms,
                                              double hop_ms, WindowType window);

// MFCC 0..n_mfcc-1 via pre-emphasis, Hann window, magnitude spectrum,
// mel filterbank, log, DCT-II (orthonormal).
std::vector<FrameTrack> mfcc_tracks(const AudioClip& clip, const FeatureConfig& cfg = {});

// Regression delta over +-window frames; order 2 applies it twice.
FrameTrack delta_track(const FrameTrack& track, int order, int window = 2);

FrameTrack zcr_track(const AudioClip& clip, const FeatureConfig& cfg = {});
FrameTrack intensity_track(const AudioClip& clip, const FeatureConfig& cfg = {});

// F0 and HNR share one normalized-autocorrelation pitch analysis.
struct PitchTracks {
    FrameTrack f0;  // Hz, voiced frames only
    FrameTrack hnr; // dB, voiced frames only
};
PitchTracks pitch_tracks(const AudioClip& clip, const FeatureConfig& cfg = {});
FrameTrack f0_track(const AudioClip& clip, const FeatureConfig& cfg = {});
FrameTrack hnr_track(const AudioClip& clip, const FeatureConfig& cfg = {});

struct JitterShimmer {
    double jitter_local = 0.0;  // mean |T_i - T_{i+1}| / mean T_i
    double jitter_abs_s = 0.0;  // mean |T_i - T_{i+1}| in seconds
    double shimmer_local = 0.0; // mean |A_i - A_{i+1}| / mean A_i
    size_t n_periods = 0;
    bool defined = false; // false when fewer than 3 periods were found
};
JitterShimmer jitter_shimmer(const AudioClip& clip, const FrameTrack& f0,
                             const FeatureConfig& cfg = {});

struct PauseFeatures {
    double total_dur_s = 0.0;
    double speech_dur_s = 0.0;
    int pause_count = 0;
    double mean_pause_s = 0.0;
    double pause_rate = 0.0;     // pauses per second
    double phonation_rate = 0.0; // speech_dur / total_dur
};
PauseFeatures pause_features(const AudioClip& clip, const FeatureConfig& cfg = {});

enum class Functional { Min, Max, Mean, Var, Skew, Kurt };

struct FunctionalValue {
    double value = 0.0;
    bool defined = false;
};
// Population moments over present frames. Variance needs >= 2 values; skewness
// and excess kurtosis need >= 3 values and nonzero variance.
FunctionalValue apply_functional(const FrameTrack& track, Functional f);

// Ordered, versioned list of feature names; the extraction contract.
struct FeatureManifest {
    std::string version;
    std::vector<std::string> entries;

    size_t size() const { return entries.size(); }
    int index_of(const std::string& name) const;

    static FeatureManifest v1();
    static FeatureManifest load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

struct FeatureVector {
    std::vector<double> values;
    std::string manifest_id;
    std::vector<std::string> flags; // manifest entries imputed as 0
};

// Assemble every (descriptor, functional) manifest entry for one clip.
FeatureVector extract_conventional(const AudioClip& clip, const FeatureManifest& manifest,
                                   const FeatureConfig& cfg = {});

} // namespace phq
