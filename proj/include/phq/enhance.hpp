#pragma once

#include "phq/types.hpp"

namespace phq {

struct EnhancementConfig {
    double frame_ms = 32.0;
    double overlap_fraction = 0.5;
    int noise_frames = 6;        // leading frames used for the noise estimate
    double ddir_alpha = 0.98;    // decision-directed a priori SNR smoothing
    double gain_floor = 0.1;

    void validate() const;
};

// Exponential integral E1(x) = ∫_x^∞ e^-t / t dt for x > 0.
// Series expansion below 1, continued fraction above; relative error < 1e-8.
double expint_e1(double x);

// Extremes of the applied spectral gains across all frames and bins.
struct GainStats {
    double min_gain = 1.0;
    double max_gain = 0.0;
};

// Short-time spectral amplitude enhancement with a log-MMSE gain.
// Noise PSD comes from the leading noise_frames frames; gains are clamped to
// [gain_floor, 1]; output has the same length and sample rate as the input.
AudioClip logmmse_enhance(const AudioClip& clip, const EnhancementConfig& cfg = {},
                          GainStats* stats = nullptr);

// Analysis/synthesis pass with all spectral gains forced to 1; reproduces the
// input up to overlap-add edge handling. Exposed to verify the STFT identity.
AudioClip stft_roundtrip(const AudioClip& clip, const EnhancementConfig& cfg = {});

} // namespace phq
