#include "phq/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "phq/csv.hpp"
#include "phq/errors.hpp"
#include "phq/fft.hpp"

namespace phq {

namespace {

std::vector<double> hann_window(size_t len) {
    std::vector<double> w(len, 1.0);
    if (len < 2) return w;
    for (size_t i = 0; i < len; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(len - 1));
    return w;
}

size_t hop_samples(double hop_ms, int sample_rate) {
    auto h = size_t(std::lround(hop_ms * sample_rate / 1000.0));
    return std::max<size_t>(h, 1);
}

double clamped_log(double x, double floor) { return std::log(std::max(x, floor)); }

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

// Triangular mel filterbank evaluated at the FFT bin centers.
std::vector<std::vector<double>> mel_filterbank(int n_mels, size_t nfft, int sample_rate) {
    const double mel_max = hz_to_mel(sample_rate / 2.0);
    std::vector<double> mel_pts(n_mels + 2);
    for (int j = 0; j < n_mels + 2; ++j) mel_pts[j] = mel_max * double(j) / double(n_mels + 1);

    const size_t n_bins = nfft / 2 + 1;
    std::vector<std::vector<double>> fb(n_mels, std::vector<double>(n_bins, 0.0));
    for (size_t k = 0; k < n_bins; ++k) {
        const double mel_k = hz_to_mel(double(k) * sample_rate / double(nfft));
        for (int j = 0; j < n_mels; ++j) {
            const double lo = mel_pts[j], mid = mel_pts[j + 1], hi = mel_pts[j + 2];
            if (mel_k <= lo || mel_k >= hi) continue;
            fb[j][k] = mel_k <= mid ? (mel_k - lo) / (mid - lo) : (hi - mel_k) / (hi - mid);
        }
    }
    return fb;
}

struct FrameGrid {
    size_t frame_len = 0;
    size_t hop = 0;
    size_t n_frames = 0;
};

FrameGrid make_grid(const AudioClip& clip, double frame_ms, double hop_ms) {
    if (clip.samples.empty()) throw EmptyInputError("cannot frame empty clip");
    FrameGrid g;
    g.frame_len = frame_length_samples(frame_ms, clip.sample_rate);
    g.hop = hop_samples(hop_ms, clip.sample_rate);
    if (clip.size() < g.frame_len)
        throw InsufficientAudioError("clip shorter than one frame (" +
                                     std::to_string(clip.size()) + " < " +
                                     std::to_string(g.frame_len) + " samples)");
    g.n_frames = (clip.size() - g.frame_len) / g.hop + 1;
    return g;
}

FrameTrack empty_like(const FrameTrack& t, std::string descriptor) {
    FrameTrack out;
    out.descriptor = std::move(descriptor);
    out.frame_len_ms = t.frame_len_ms;
    out.frame_hop_ms = t.frame_hop_ms;
    return out;
}

} // namespace

size_t FrameTrack::present_count() const {
    size_t n = 0;
    for (auto p : present) n += p ? 1 : 0;
    return n;
}

std::vector<double> FrameTrack::present_values() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (size_t i = 0; i < values.size(); ++i)
        if (present[i]) out.push_back(values[i]);
    return out;
}

size_t frame_length_samples(double frame_ms, int sample_rate) {
    if (frame_ms <= 0 || sample_rate <= 0) throw ConfigError("frame length must be positive");
    auto len = size_t(std::lround(frame_ms * sample_rate / 1000.0));
    if (len < 2) throw ConfigError("frame shorter than 2 samples");
    return len;
}

std::vector<std::vector<double>> frame_signal(const AudioClip& clip, double frame_ms,
                                              double hop_ms, WindowType window) {
    const FrameGrid g = make_grid(clip, frame_ms, hop_ms);
    const std::vector<double> win =
        window == WindowType::Hann ? hann_window(g.frame_len) : std::vector<double>();

    std::vector<std::vector<double>> frames(g.n_frames, std::vector<double>(g.frame_len));
    for (size_t t = 0; t < g.n_frames; ++t) {
        const size_t start = t * g.hop;
        for (size_t i = 0; i < g.frame_len; ++i) {
            double v = clip.samples[start + i];
            if (!win.empty()) v *= win[i];
            frames[t][i] = v;
        }
    }
    return frames;
}

std::vector<FrameTrack> mfcc_tracks(const AudioClip& clip, const FeatureConfig& cfg) {
    if (cfg.n_mfcc < 1 || cfg.n_mels < cfg.n_mfcc) throw ConfigError("bad MFCC/mel counts");

    AudioClip pre = clip;
    for (size_t i = pre.samples.size(); i-- > 1;)
        pre.samples[i] -= cfg.preemphasis * pre.samples[i - 1];
    if (!pre.samples.empty()) pre.samples[0] -= cfg.preemphasis * pre.samples[0];

    const FrameGrid g = make_grid(pre, cfg.frame_ms, cfg.hop_ms);
    size_t nfft = 1;
    while (nfft < g.frame_len) nfft *= 2;

    const auto win = hann_window(g.frame_len);
    const auto fb = mel_filterbank(cfg.n_mels, nfft, clip.sample_rate);
    RealFft fft(nfft);

    // Orthonormal DCT-II basis over the mel energies.
    const int M = cfg.n_mels;
    std::vector<std::vector<double>> dct(cfg.n_mfcc, std::vector<double>(M));
    for (int i = 0; i < cfg.n_mfcc; ++i) {
        const double scale = std::sqrt((i == 0 ? 1.0 : 2.0) / M);
        for (int j = 0; j < M; ++j)
            dct[i][j] = scale * std::cos(std::numbers::pi * i * (2.0 * j + 1.0) / (2.0 * M));
    }

    std::vector<FrameTrack> tracks(cfg.n_mfcc);
    for (int i = 0; i < cfg.n_mfcc; ++i) {
        tracks[i].descriptor = "MFCC" + std::to_string(i);
        tracks[i].frame_len_ms = cfg.frame_ms;
        tracks[i].frame_hop_ms = cfg.hop_ms;
        tracks[i].values.resize(g.n_frames);
        tracks[i].present.assign(g.n_frames, 1);
    }

    std::vector<double> frame(g.frame_len);
    std::vector<double> power(fft.bins());
    std::vector<double> log_mel(M);
    for (size_t t = 0; t < g.n_frames; ++t) {
        const size_t start = t * g.hop;
        for (size_t i = 0; i < g.frame_len; ++i) frame[i] = pre.samples[start + i] * win[i];
        auto spec = fft.forward(frame);
        for (size_t k = 0; k < spec.size(); ++k) power[k] = std::norm(spec[k]) / double(nfft);
        for (int j = 0; j < M; ++j) {
            double e = 0.0;
            for (size_t k = 0; k < power.size(); ++k) e += fb[j][k] * power[k];
            log_mel[j] = clamped_log(e, cfg.log_floor);
        }
        for (int i = 0; i < cfg.n_mfcc; ++i) {
            double c = 0.0;
            for (int j = 0; j < M; ++j) c += dct[i][j] * log_mel[j];
            tracks[i].values[t] = c;
        }
    }
    return tracks;
}

FrameTrack delta_track(const FrameTrack& track, int order, int window) {
    if (order < 1 || order > 2) throw ConfigError("delta order must be 1 or 2");
    if (window < 1) throw ConfigError("delta window must be >= 1");
    if (track.count() < size_t(2 * window + 1))
        throw InsufficientDataError("track too short for delta window");

    const auto& v = track.values;
    const long n = long(v.size());
    double denom = 0.0;
    for (int k = 1; k <= window; ++k) denom += 2.0 * k * k;

    FrameTrack out = empty_like(track, (order == 1 ? "d" : "dd") + track.descriptor);
    out.values.resize(v.size());
    out.present.assign(v.size(), 1);
    for (long t = 0; t < n; ++t) {
        double acc = 0.0;
        for (int k = 1; k <= window; ++k) {
            const double right = v[size_t(std::min(t + k, n - 1))];
            const double left = v[size_t(std::max(t - k, 0L))];
            acc += k * (right - left);
        }
        out.values[size_t(t)] = acc / denom;
    }
    if (order == 2) {
        FrameTrack base = out;
        base.descriptor = track.descriptor;
        out = delta_track(base, 1, window);
        out.descriptor = "dd" + track.descriptor;
    }
    return out;
}

FrameTrack zcr_track(const AudioClip& clip, const FeatureConfig& cfg) {
    const FrameGrid g = make_grid(clip, cfg.frame_ms, cfg.hop_ms);
    FrameTrack out;
    out.descriptor = "ZCR";
    out.frame_len_ms = cfg.frame_ms;
    out.frame_hop_ms = cfg.hop_ms;
    out.values.resize(g.n_frames);
    out.present.assign(g.n_frames, 1);
    for (size_t t = 0; t < g.n_frames; ++t) {
        const size_t start = t * g.hop;
        size_t crossings = 0;
        for (size_t i = 1; i < g.frame_len; ++i)
            if (clip.samples[start + i - 1] * clip.samples[start + i] < 0.0) ++crossings;
        out.values[t] = double(crossings) / double(g.frame_len);
    }
    return out;
}

FrameTrack intensity_track(const AudioClip& clip, const FeatureConfig& cfg) {
    const FrameGrid g = make_grid(clip, cfg.frame_ms, cfg.hop_ms);
    FrameTrack out;
    out.descriptor = "intensity";
    out.frame_len_ms = cfg.frame_ms;
    out.frame_hop_ms = cfg.hop_ms;
    out.values.resize(g.n_frames);
    out.present.assign(g.n_frames, 1);
    for (size_t t = 0; t < g.n_frames; ++t) {
        const size_t start = t * g.hop;
        double acc = 0.0;
        for (size_t i = 0; i < g.frame_len; ++i) {
            const double s = clip.samples[start + i];
            acc += s * s;
        }
        const double rms = std::sqrt(acc / double(g.frame_len));
        out.values[t] = 20.0 * std::log10(std::max(rms, 1e-10));
    }
    return out;
}

FunctionalValue apply_functional(const FrameTrack& track, Functional f) {
    const auto vals = track.present_values();
    const size_t n = vals.size();
    FunctionalValue out;
    if (n == 0) return out;

    if (f == Functional::Min || f == Functional::Max) {
        auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
        out.value = f == Functional::Min ? *lo : *hi;
        out.defined = true;
        return out;
    }

    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= double(n);
    if (f == Functional::Mean) return {mean, true};

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : vals) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= double(n);
    m3 /= double(n);
    m4 /= double(n);

    switch (f) {
    case Functional::Var:
        if (n < 2) return out;
        return {m2, true};
    case Functional::Skew:
        if (n < 3 || m2 <= 1e-30) return out;
        return {m3 / std::pow(m2, 1.5), true};
    case Functional::Kurt:
        if (n < 3 || m2 <= 1e-30) return out;
        return {m4 / (m2 * m2) - 3.0, true};
    default:
        return out;
    }
}

PauseFeatures pause_features(const AudioClip& clip, const FeatureConfig& cfg) {
    if (clip.samples.empty()) throw EmptyInputError("cannot analyze empty clip");

    PauseFeatures out;
    out.total_dur_s = clip.duration_s();

    const size_t frame_len =
        std::min(frame_length_samples(cfg.frame_ms, clip.sample_rate), clip.size());
    const size_t hop = hop_samples(cfg.hop_ms, clip.sample_rate);
    const size_t n_frames = (clip.size() - frame_len) / hop + 1;
    const double frame_s = double(frame_len) / clip.sample_rate;
    const double hop_s = double(hop) / clip.sample_rate;

    std::vector<uint8_t> silent(n_frames);
    size_t silent_count = 0;
    for (size_t t = 0; t < n_frames; ++t) {
        double acc = 0.0;
        for (size_t i = 0; i < frame_len; ++i) {
            const double s = clip.samples[t * hop + i];
            acc += s * s;
        }
        const double db = 20.0 * std::log10(std::max(std::sqrt(acc / double(frame_len)), 1e-10));
        silent[t] = db < cfg.silence_dbfs ? 1 : 0;
        silent_count += silent[t];
    }

    if (silent_count == n_frames) {
        out.pause_count = 1;
        out.mean_pause_s = out.total_dur_s;
        out.pause_rate = out.total_dur_s > 0 ? 1.0 / out.total_dur_s : 0.0;
        return out; // speech_dur and phonation_rate stay 0
    }

    double pause_total = 0.0;
    const double min_pause_s = cfg.min_pause_ms / 1000.0;
    for (size_t t = 0; t < n_frames;) {
        if (!silent[t]) {
            ++t;
            continue;
        }
        size_t run = 0;
        while (t + run < n_frames && silent[t + run]) ++run;
        const double dur = double(run - 1) * hop_s + frame_s;
        if (dur >= min_pause_s) {
            ++out.pause_count;
            pause_total += dur;
        }
        t += run;
    }

    out.speech_dur_s = std::max(0.0, out.total_dur_s - pause_total);
    out.mean_pause_s = out.pause_count > 0 ? pause_total / out.pause_count : 0.0;
    out.pause_rate = out.total_dur_s > 0 ? out.pause_count / out.total_dur_s : 0.0;
    out.phonation_rate = out.total_dur_s > 0 ? out.speech_dur_s / out.total_dur_s : 0.0;
    return out;
}

int FeatureManifest::index_of(const std::string& name) const {
    auto it = std::find(entries.begin(), entries.end(), name);
    return it == entries.end() ? -1 : int(it - entries.begin());
}

FeatureManifest FeatureManifest::v1() {
    FeatureManifest m;
    m.version = "v1";
    const std::vector<std::string> all6 = {"min", "max", "mean", "var", "skew", "kurt"};
    const std::vector<std::string> shape2 = {"skew", "kurt"};
    const std::vector<std::string> basic4 = {"min", "max", "mean", "var"};

    for (int i = 0; i < 13; ++i)
        for (const auto& f : all6) m.entries.push_back("MFCC" + std::to_string(i) + "_" + f);
    for (int i = 0; i < 13; ++i)
        for (const auto& f : shape2) m.entries.push_back("dMFCC" + std::to_string(i) + "_" + f);
    for (int i = 0; i < 13; ++i)
        for (const auto& f : shape2) m.entries.push_back("ddMFCC" + std::to_string(i) + "_" + f);
    for (const auto& f : all6) m.entries.push_back("ZCR_" + f);
    for (const auto& f : basic4) m.entries.push_back("intensity_" + f);
    for (const auto& f : basic4) m.entries.push_back("F0_" + f);
    for (const auto& f : basic4) m.entries.push_back("HNR_" + f);
    for (const char* s : {"jitter_local", "jitter_abs", "shimmer_local", "total_dur",
                          "speech_dur", "pause_count", "mean_pause", "pause_rate",
                          "phonation_rate", "voiced_fraction"})
        m.entries.emplace_back(s);
    return m;
}

FeatureManifest FeatureManifest::load(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    FeatureManifest m;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# manifest_version:", 0) == 0) {
            m.version = line.substr(line.find(':') + 1);
            while (!m.version.empty() && m.version.front() == ' ') m.version.erase(0, 1);
            saw_header = true;
            continue;
        }
        if (line.front() == '#') continue;
        if (m.index_of(line) >= 0)
            throw FormatError("duplicate manifest entry: " + line);
        m.entries.push_back(line);
    }
    if (!saw_header) throw FormatError("manifest missing version header: " + path.string());
    if (m.entries.empty()) throw FormatError("manifest has no entries: " + path.string());
    return m;
}

void FeatureManifest::save(const std::filesystem::path& path) const {
    std::string text = "# manifest_version: " + version + "\n";
    for (const auto& e : entries) text += e + "\n";
    atomic_write_text(path, text);
}

FeatureVector extract_conventional(const AudioClip& clip, const FeatureManifest& manifest,
                                   const FeatureConfig& cfg) {
    std::map<std::string, FunctionalValue> stats;
    const std::vector<std::pair<std::string, Functional>> funcs = {
        {"min", Functional::Min},   {"max", Functional::Max}, {"mean", Functional::Mean},
        {"var", Functional::Var},   {"skew", Functional::Skew}, {"kurt", Functional::Kurt}};

    auto add_track = [&](const FrameTrack& t) {
        for (const auto& [suffix, f] : funcs)
            stats[t.descriptor + "_" + suffix] = apply_functional(t, f);
    };

    const auto mfcc = mfcc_tracks(clip, cfg);
    for (const auto& t : mfcc) add_track(t);
    for (const auto& t : mfcc) {
        FrameTrack d = t.count() >= size_t(2 * cfg.delta_window + 1)
                           ? delta_track(t, 1, cfg.delta_window)
                           : empty_like(t, "d" + t.descriptor);
        FrameTrack dd = t.count() >= size_t(2 * cfg.delta_window + 1)
                            ? delta_track(t, 2, cfg.delta_window)
                            : empty_like(t, "dd" + t.descriptor);
        add_track(d);
        add_track(dd);
    }
    add_track(zcr_track(clip, cfg));
    add_track(intensity_track(clip, cfg));

    const auto pitch = pitch_tracks(clip, cfg);
    add_track(pitch.f0);
    add_track(pitch.hnr);

    const auto js = jitter_shimmer(clip, pitch.f0, cfg);
    stats["jitter_local"] = {js.jitter_local, js.defined};
    stats["jitter_abs"] = {js.jitter_abs_s, js.defined};
    stats["shimmer_local"] = {js.shimmer_local, js.defined};

    const auto pause = pause_features(clip, cfg);
    stats["total_dur"] = {pause.total_dur_s, true};
    stats["speech_dur"] = {pause.speech_dur_s, true};
    stats["pause_count"] = {double(pause.pause_count), true};
    stats["mean_pause"] = {pause.mean_pause_s, true};
    stats["pause_rate"] = {pause.pause_rate, true};
    stats["phonation_rate"] = {pause.phonation_rate, true};
    stats["voiced_fraction"] =
        pitch.f0.count() > 0
            ? FunctionalValue{double(pitch.f0.present_count()) / double(pitch.f0.count()), true}
            : FunctionalValue{};

    FeatureVector out;
    out.manifest_id = manifest.version;
    out.values.reserve(manifest.size());
    for (const auto& name : manifest.entries) {
        auto it = stats.find(name);
        if (it == stats.end()) throw ConfigError("manifest entry not computed: " + name);
        if (it->second.defined) {
            out.values.push_back(it->second.value);
        } else {
            out.values.push_back(0.0);
            out.flags.push_back(name);
        }
    }
    return out;
}

} // namespace phq

namespace phq {

FrameTrack f0_track(const AudioClip& clip, const FeatureConfig& cfg) {
    return pitch_tracks(clip, cfg).f0;
}

FrameTrack hnr_track(const AudioClip& clip, const FeatureConfig& cfg) {
    return pitch_tracks(clip, cfg).hnr;
}

} // namespace phq
