#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "phq/types.hpp"

namespace phq {

// Cycle-level voice parameters for one synthetic utterance.
struct UtteranceParams {
    int sample_rate = 16000;
    double duration_s = 3.5;
    double f0_hz = 120.0;
    double jitter = 0.01;         // target mean |dT| / mean T
    double shimmer = 0.05;        // target mean |dA| / mean A
    double pause_fraction = 0.15; // fraction of the clip spent silent
    double noise_level = 0.02;    // relative to speech RMS
    int n_harmonics = 8;
};

// Harmonic vowel with phase-accumulated cycles; period and amplitude are
// redrawn per glottal cycle so jitter and shimmer are controlled exactly.
AudioClip synth_utterance(const UtteranceParams& p, uint64_t seed);

struct SynthConfig {
    size_t n_subjects = 60;
    size_t tasks_per_subject = 5; // one sample per task, tasks cycle in order
    int sample_rate = 16000;
    double coupling = 1.0;    // 0 = voice independent of PHQ-8, 1 = full effect
    double noise_level = 0.02;
    double base_duration_s = 3.5;
    double duration_spread_s = 1.0;
    bool emit_deep = false;
    size_t deep_dims = 4096;
    double deep_window_s = 1.0;
    double deep_hop_s = 0.3;
};

// Writes audio/<id>.wav, metadata.csv and optionally deep/<id>.csv under
// out_dir; returns the metadata in generation order.
std::vector<SampleMeta> synth_corpus(const std::filesystem::path& out_dir, const SynthConfig& cfg,
                                     uint64_t seed);

} // namespace phq
