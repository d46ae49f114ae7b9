#include "phq/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "phq/fft.hpp"

namespace phq {

void EnhancementConfig::validate() const {
    if (frame_ms <= 0) throw ConfigError("enhancement frame_ms must be positive");
    if (overlap_fraction <= 0 || overlap_fraction >= 1)
        throw ConfigError("enhancement overlap_fraction must be in (0,1)");
    if (noise_frames < 1) throw ConfigError("enhancement noise_frames must be >= 1");
    if (ddir_alpha <= 0 || ddir_alpha >= 1)
        throw ConfigError("enhancement ddir_alpha must be in (0,1)");
    if (gain_floor <= 0 || gain_floor >= 1)
        throw ConfigError("enhancement gain_floor must be in (0,1)");
}

double expint_e1(double x) {
    if (x <= 0.0) throw std::invalid_argument("expint_e1 requires x > 0");
    constexpr double euler_gamma = 0.57721566490153286060;
    if (x < 1.0) {
        // Power series: E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k * k!)
        double sum = -euler_gamma - std::log(x);
        double term = 1.0; // x^k / k! running factor
        for (int k = 1; k <= 60; ++k) {
            term *= x / k;
            double contrib = term / k;
            sum += (k % 2 == 1) ? contrib : -contrib;
            if (contrib < 1e-17 * std::max(1.0, std::abs(sum))) break;
        }
        return sum;
    }
    if (x > 700.0) return 0.0;
    // Continued fraction (modified Lentz).
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 200; ++i) {
        double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x);
}

namespace {

std::vector<double> hann_window(size_t len) {
    std::vector<double> w(len);
    if (len == 1) { w[0] = 1.0; return w; }
    for (size_t i = 0; i < len; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (len - 1));
    return w;
}

struct GainFn {
    virtual ~GainFn() = default;
    // Fill gains[bin] for one frame given its power spectrum.
    virtual void operator()(const std::vector<double>& power, std::vector<double>& gains) = 0;
};

// Weighted overlap-add STFT pass: window, transform, scale bins, resynthesize.
AudioClip stft_process(const AudioClip& clip, const EnhancementConfig& cfg, GainFn& gain_fn) {
    cfg.validate();
    if (clip.sample_rate <= 0) throw DataError("invalid sample rate");
    size_t frame_len = static_cast<size_t>(std::lround(cfg.frame_ms / 1000.0 * clip.sample_rate));
    if (frame_len < 4) throw ConfigError("enhancement frame too short for sample rate");
    if (frame_len % 2) ++frame_len;
    size_t hop = static_cast<size_t>(std::lround(frame_len * (1.0 - cfg.overlap_fraction)));
    hop = std::clamp<size_t>(hop, 1, frame_len);
    size_t n = clip.samples.size();
    if (n < static_cast<size_t>(cfg.noise_frames) * frame_len)
        throw InsufficientAudioError("clip shorter than the leading noise segment");

    const std::vector<double> window = hann_window(frame_len);
    RealFft fft(frame_len);
    size_t bins = fft.bins();

    // Zero-pad both ends so every input sample gets full window coverage.
    size_t pad = frame_len;
    size_t last_start = pad + n - 1;
    size_t n_frames = last_start / hop + 1;
    std::vector<double> padded(pad + n + frame_len + hop, 0.0);
    std::copy(clip.samples.begin(), clip.samples.end(), padded.begin() + pad);

    std::vector<double> out_acc(padded.size(), 0.0);
    std::vector<double> win_acc(padded.size(), 0.0);
    std::vector<double> frame(frame_len), power(bins), gains(bins);

    for (size_t m = 0; m < n_frames; ++m) {
        size_t start = m * hop;
        for (size_t i = 0; i < frame_len; ++i) frame[i] = padded[start + i] * window[i];
        auto spectrum = fft.forward(frame);
        for (size_t k = 0; k < bins; ++k) power[k] = std::norm(spectrum[k]);
        gain_fn(power, gains);
        for (size_t k = 0; k < bins; ++k) spectrum[k] *= gains[k];
        auto resynth = fft.inverse(spectrum);
        for (size_t i = 0; i < frame_len; ++i) {
            out_acc[start + i] += resynth[i];
            win_acc[start + i] += window[i];
        }
    }

    AudioClip out;
    out.sample_rate = clip.sample_rate;
    out.id = clip.id;
    out.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double w = win_acc[pad + i];
        out.samples[i] = w > 1e-9 ? out_acc[pad + i] / w : 0.0;
    }
    return out;
}

// Mean power spectrum of the leading noise frames (non-overlapping would waste
// signal; hop-spaced frames starting at sample 0).
std::vector<double> estimate_noise_psd(const AudioClip& clip, size_t frame_len, size_t hop,
                                       int noise_frames, const std::vector<double>& window) {
    RealFft fft(frame_len);
    std::vector<double> psd(fft.bins(), 0.0);
    std::vector<double> frame(frame_len);
    for (int m = 0; m < noise_frames; ++m) {
        size_t start = static_cast<size_t>(m) * hop;
        for (size_t i = 0; i < frame_len; ++i) {
            size_t idx = start + i;
            frame[i] = idx < clip.samples.size() ? clip.samples[idx] * window[i] : 0.0;
        }
        auto spectrum = fft.forward(frame);
        for (size_t k = 0; k < psd.size(); ++k) psd[k] += std::norm(spectrum[k]);
    }
    for (double& v : psd) v = std::max(v / noise_frames, 1e-20);
    return psd;
}

struct LogMmseGain final : GainFn {
    LogMmseGain(std::vector<double> noise_psd, double ddir_alpha, double floor, GainStats* s)
        : noise(std::move(noise_psd)), alpha(ddir_alpha), gain_floor(floor), stats(s),
          prev_amp2(noise.size(), 0.0) {}

    void operator()(const std::vector<double>& power, std::vector<double>& gains) override {
        for (size_t k = 0; k < power.size(); ++k) {
            double gamma = std::min(power[k] / noise[k], 40.0);
            double snr_inst = std::max(gamma - 1.0, 0.0);
            double xi = first_frame ? alpha + (1.0 - alpha) * snr_inst
                                    : alpha * prev_amp2[k] / noise[k] + (1.0 - alpha) * snr_inst;
            xi = std::max(xi, 1e-10);
            double v = std::max(gamma * xi / (1.0 + xi), 1e-10);
            double g = xi / (1.0 + xi) * std::exp(0.5 * expint_e1(v));
            g = std::clamp(g, gain_floor, 1.0);
            gains[k] = g;
            if (stats) {
                stats->min_gain = std::min(stats->min_gain, g);
                stats->max_gain = std::max(stats->max_gain, g);
            }
            prev_amp2[k] = g * g * power[k];
        }
        first_frame = false;
    }

    std::vector<double> noise;
    double alpha, gain_floor;
    GainStats* stats;
    std::vector<double> prev_amp2;
    bool first_frame = true;
};

struct UnityGain final : GainFn {
    void operator()(const std::vector<double>&, std::vector<double>& gains) override {
        std::fill(gains.begin(), gains.end(), 1.0);
    }
};

} // namespace

AudioClip logmmse_enhance(const AudioClip& clip, const EnhancementConfig& cfg, GainStats* stats) {
    cfg.validate();
    if (clip.sample_rate <= 0) throw DataError("invalid sample rate");
    size_t frame_len = static_cast<size_t>(std::lround(cfg.frame_ms / 1000.0 * clip.sample_rate));
    if (frame_len < 4) throw ConfigError("enhancement frame too short for sample rate");
    if (frame_len % 2) ++frame_len;
    size_t hop = static_cast<size_t>(std::lround(frame_len * (1.0 - cfg.overlap_fraction)));
    hop = std::clamp<size_t>(hop, 1, frame_len);
    if (clip.samples.size() < static_cast<size_t>(cfg.noise_frames) * frame_len)
        throw InsufficientAudioError("clip shorter than the leading noise segment");

    auto window = hann_window(frame_len);
    LogMmseGain gain(estimate_noise_psd(clip, frame_len, hop, cfg.noise_frames, window),
                     cfg.ddir_alpha, cfg.gain_floor, stats);
    return stft_process(clip, cfg, gain);
}

// Analysis/synthesis only, all gains forced to 1. Verifies the windowing
// identity of the overlap-add machinery.
AudioClip stft_roundtrip(const AudioClip& clip, const EnhancementConfig& cfg) {
    UnityGain unity;
    return stft_process(clip, cfg, unity);
}

} // namespace phq
