#pragma once

#include <filesystem>

#include "phq/types.hpp"

namespace phq {

// Decode a RIFF/WAVE file (PCM16 or float32, mono or stereo). Stereo is
// downmixed by channel average; integer samples are scaled to [-1, 1].
AudioClip load_wav(const std::filesystem::path& path);

// Write mono PCM16. load_wav(write_wav(clip)) preserves 16-bit samples exactly.
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

// Scale so the output RMS equals 10^(target_dbfs/20). Samples that would
// leave [-1, 1] are clipped and *clipped is set.
AudioClip normalize_dbfs(const AudioClip& clip, double target_dbfs, bool* clipped = nullptr);

double rms(std::span<const double> samples);

} // namespace phq
