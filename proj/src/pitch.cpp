#include <algorithm>
#include <cmath>
#include <vector>

#include "phq/errors.hpp"
#include "phq/features.hpp"

namespace phq {

namespace {

struct PeakFit {
    double pos = 0.0;
    double value = 0.0;
};

// Parabola through (k-1, k, k+1); offset clamped to half a sample.
PeakFit refine_peak(const std::vector<double>& x, size_t k) {
    PeakFit fit{double(k), x[k]};
    if (k == 0 || k + 1 >= x.size()) return fit;
    const double lm = x[k - 1], c = x[k], rp = x[k + 1];
    const double denom = lm - 2.0 * c + rp;
    if (denom >= -1e-300) return fit;
    double delta = 0.5 * (lm - rp) / denom;
    delta = std::clamp(delta, -0.5, 0.5);
    fit.pos = double(k) + delta;
    fit.value = c - 0.25 * (lm - rp) * delta;
    return fit;
}

// Normalized cross-correlation over the lag range, with prefix-sum energies
// so the score of a pure tone stays near 1 at every lag.
std::vector<double> ncc_curve(const std::vector<double>& frame, size_t tau_lo, size_t tau_hi) {
    const size_t n = frame.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + frame[i] * frame[i];

    std::vector<double> r(tau_hi + 1, 0.0);
    for (size_t tau = tau_lo; tau <= tau_hi; ++tau) {
        double dot = 0.0;
        for (size_t i = 0; i + tau < n; ++i) dot += frame[i] * frame[i + tau];
        const double e_head = prefix[n - tau];
        const double e_tail = prefix[n] - prefix[tau];
        const double denom = std::sqrt(e_head * e_tail);
        r[tau] = denom > 1e-20 ? dot / denom : 0.0;
    }
    return r;
}

} // namespace

PitchTracks pitch_tracks(const AudioClip& clip, const FeatureConfig& cfg) {
    if (cfg.f0_min_hz <= 0 || cfg.f0_max_hz <= cfg.f0_min_hz)
        throw ConfigError("invalid F0 search range");
    if (clip.samples.empty()) throw EmptyInputError("cannot analyze empty clip");

    const size_t frame_len = frame_length_samples(cfg.pitch_frame_ms, clip.sample_rate);
    const size_t hop = std::max<size_t>(size_t(std::lround(cfg.hop_ms * clip.sample_rate / 1000.0)), 1);
    if (clip.size() < frame_len)
        throw InsufficientAudioError("clip shorter than one pitch frame");
    const size_t n_frames = (clip.size() - frame_len) / hop + 1;

    const size_t tau_min = std::max<size_t>(2, size_t(std::floor(clip.sample_rate / cfg.f0_max_hz)));
    const size_t tau_max =
        std::min(size_t(std::ceil(clip.sample_rate / cfg.f0_min_hz)), frame_len - 2);
    if (tau_min + 2 > tau_max) throw ConfigError("pitch frame too short for F0 search range");
    const size_t curve_lo = tau_min > 2 ? tau_min - 1 : tau_min;
    const size_t curve_hi = std::min(tau_max + 1, frame_len - 2);

    PitchTracks out;
    for (FrameTrack* t : {&out.f0, &out.hnr}) {
        t->frame_len_ms = cfg.pitch_frame_ms;
        t->frame_hop_ms = cfg.hop_ms;
        t->values.assign(n_frames, 0.0);
        t->present.assign(n_frames, 0);
    }
    out.f0.descriptor = "F0";
    out.hnr.descriptor = "HNR";

    std::vector<double> frame(frame_len);
    for (size_t t = 0; t < n_frames; ++t) {
        double mean = 0.0;
        for (size_t i = 0; i < frame_len; ++i) mean += clip.samples[t * hop + i];
        mean /= double(frame_len);
        for (size_t i = 0; i < frame_len; ++i) frame[i] = clip.samples[t * hop + i] - mean;

        const auto r = ncc_curve(frame, curve_lo, curve_hi);
        double r_max = 0.0;
        for (size_t tau = tau_min; tau <= tau_max; ++tau) r_max = std::max(r_max, r[tau]);
        if (r_max < cfg.voicing_threshold) continue;

        // Smallest-lag strong local maximum; avoids halving to a subharmonic.
        size_t best = 0;
        for (size_t tau = tau_min; tau <= tau_max; ++tau) {
            const bool local_max = r[tau] >= r[tau - 1] && r[tau] >= r[tau + 1];
            if (local_max && r[tau] >= 0.87 * r_max) {
                best = tau;
                break;
            }
        }
        if (best == 0) continue;

        const auto fit = refine_peak(r, best);
        if (fit.pos <= 0.0) continue;
        out.f0.values[t] = clip.sample_rate / fit.pos;
        out.f0.present[t] = 1;
        const double rc = std::clamp(fit.value, 1e-6, 1.0 - 1e-6);
        out.hnr.values[t] = 10.0 * std::log10(rc / (1.0 - rc));
        out.hnr.present[t] = 1;
    }
    return out;
}

JitterShimmer jitter_shimmer(const AudioClip& clip, const FrameTrack& f0,
                             const FeatureConfig& cfg) {
    JitterShimmer out;
    if (clip.samples.empty() || f0.count() == 0) return out;

    const size_t frame_len = frame_length_samples(cfg.pitch_frame_ms, clip.sample_rate);
    const size_t hop = std::max<size_t>(size_t(std::lround(cfg.hop_ms * clip.sample_rate / 1000.0)), 1);
    const auto& x = clip.samples;

    double period_sum = 0.0, period_diff_sum = 0.0;
    double amp_sum = 0.0, amp_diff_sum = 0.0;
    size_t n_periods = 0, n_diffs = 0, n_peaks = 0;

    auto f0_near = [&](double sample_pos, size_t first, size_t last) {
        long t = std::lround((sample_pos - frame_len / 2.0) / double(hop));
        t = std::clamp(t, long(first), long(last));
        return f0.values[size_t(t)];
    };

    size_t t = 0;
    while (t < f0.count()) {
        if (!f0.present[t]) {
            ++t;
            continue;
        }
        size_t last = t;
        while (last + 1 < f0.count() && f0.present[last + 1]) ++last;
        const size_t start_s = t * hop;
        const size_t end_s = std::min(x.size(), last * hop + frame_len);

        const double t0 = clip.sample_rate / f0.values[t];
        if (double(end_s - start_s) >= 2.0 * t0) {
            // First peak within 1.5 periods of the region start, then walk
            // period by period inside an adaptive search window.
            size_t lo = start_s;
            size_t hi = std::min(end_s, start_s + size_t(std::ceil(1.5 * t0)) + 1);
            std::vector<PeakFit> peaks;
            while (hi > lo + 2) {
                size_t arg = lo;
                for (size_t i = lo; i < hi; ++i)
                    if (x[i] > x[arg]) arg = i;
                if (arg == 0 || arg + 1 >= x.size()) break;
                peaks.push_back(refine_peak(x, arg));
                const double period = clip.sample_rate / f0_near(peaks.back().pos, t, last);
                const double next_lo = peaks.back().pos + 0.8 * period;
                const double next_hi = peaks.back().pos + 1.25 * period;
                if (next_hi >= double(end_s)) break;
                lo = size_t(std::llround(next_lo));
                hi = std::min(end_s, size_t(std::llround(next_hi)) + 1);
            }

            for (size_t i = 0; i + 1 < peaks.size(); ++i) {
                const double period = (peaks[i + 1].pos - peaks[i].pos) / clip.sample_rate;
                period_sum += period;
                ++n_periods;
                if (i + 2 < peaks.size()) {
                    const double next = (peaks[i + 2].pos - peaks[i + 1].pos) / clip.sample_rate;
                    period_diff_sum += std::abs(next - period);
                    ++n_diffs;
                }
            }
            n_peaks += peaks.size();
            for (size_t i = 0; i < peaks.size(); ++i) {
                amp_sum += peaks[i].value;
                if (i + 1 < peaks.size()) amp_diff_sum += std::abs(peaks[i + 1].value - peaks[i].value);
            }
        }
        t = last + 1;
    }

    if (n_periods < 3 || n_diffs == 0 || period_sum <= 0.0 || amp_sum <= 0.0) return out;
    const double mean_period = period_sum / double(n_periods);
    const double mean_diff = period_diff_sum / double(n_diffs);
    out.jitter_local = mean_diff / mean_period;
    out.jitter_abs_s = mean_diff;
    const double mean_amp = amp_sum / double(n_peaks);
    out.shimmer_local = (amp_diff_sum / double(n_periods)) / mean_amp;
    out.n_periods = n_periods;
    out.defined = true;
    return out;
}

} // namespace phq
