#include "phq/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "phq/audio.hpp"
#include "phq/csv.hpp"
#include "phq/errors.hpp"
#include "phq/rng.hpp"

namespace phq {

namespace {

// One voiced stretch. Per-cycle multipliers are uniform on +-1.5x the target
// so the expected |difference of consecutive draws| equals the target.
void render_voiced(std::vector<double>& out, size_t start, size_t len, const UtteranceParams& p,
                   Rng& rng) {
    const int max_h = std::max(1, std::min(p.n_harmonics, int(p.sample_rate / (2.0 * p.f0_hz)) - 1));
    std::vector<double> amp(static_cast<size_t>(max_h));
    std::vector<double> phase_off(static_cast<size_t>(max_h));
    double amp_total = 0.0;
    for (int h = 0; h < max_h; ++h) {
        amp[size_t(h)] = 1.0 / double(h + 1);
        amp_total += amp[size_t(h)];
        phase_off[size_t(h)] = rng.uniform(0.0, 1.0);
    }
    for (auto& a : amp) a /= amp_total;

    const double jw = 1.5 * p.jitter;
    const double sw = 1.5 * p.shimmer;
    double period_mult = 1.0 + rng.uniform(-jw, jw);
    double cycle_amp = 1.0 + rng.uniform(-sw, sw);
    double vibrato_phase = rng.uniform(0.0, 1.0);

    double phi = 0.0;
    for (size_t i = 0; i < len; ++i) {
        double s = 0.0;
        for (int h = 0; h < max_h; ++h)
            s += amp[size_t(h)] *
                 std::sin(2.0 * std::numbers::pi * (double(h + 1) * phi + phase_off[size_t(h)]));
        out[start + i] = cycle_amp * s;

        const double vibrato =
            1.0 + 0.015 * std::sin(2.0 * std::numbers::pi *
                                   (5.0 * double(i) / p.sample_rate + vibrato_phase));
        phi += p.f0_hz * vibrato / (p.sample_rate * period_mult);
        if (phi >= 1.0) {
            phi -= 1.0;
            period_mult = 1.0 + rng.uniform(-jw, jw);
            cycle_amp = 1.0 + rng.uniform(-sw, sw);
        }
    }

    // Half-cosine fades keep segment edges click-free.
    const size_t fade = std::min(len / 2, size_t(p.sample_rate) / 100);
    for (size_t i = 0; i < fade; ++i) {
        const double g = 0.5 - 0.5 * std::cos(std::numbers::pi * double(i) / double(fade));
        out[start + i] *= g;
        out[start + len - 1 - i] *= g;
    }
}

} // namespace

AudioClip synth_utterance(const UtteranceParams& p, uint64_t seed) {
    if (p.sample_rate <= 0 || p.duration_s <= 0) throw ConfigError("bad utterance parameters");
    if (p.f0_hz <= 0 || p.f0_hz >= p.sample_rate / 4.0) throw ConfigError("F0 outside usable range");
    if (p.pause_fraction < 0 || p.pause_fraction >= 0.8)
        throw ConfigError("pause fraction outside [0, 0.8)");

    Rng rng(seed);
    const auto n = size_t(std::llround(p.duration_s * p.sample_rate));
    AudioClip clip;
    clip.sample_rate = p.sample_rate;
    clip.samples.assign(n, 0.0);

    // Plan pauses: total silent time split into stretches of roughly 0.45 s,
    // each long enough for the pause detector's 250 ms minimum.
    const double total_pause = p.duration_s * p.pause_fraction;
    const auto n_pauses = size_t(std::floor(total_pause / 0.45 + 0.5));
    std::vector<std::pair<size_t, size_t>> voiced; // start, length
    if (n_pauses == 0) {
        voiced.emplace_back(0, n);
    } else {
        const double pause_len = total_pause / double(n_pauses);
        const double speech_len = (p.duration_s - total_pause) / double(n_pauses + 1);
        double t = 0.0;
        for (size_t k = 0; k <= n_pauses; ++k) {
            const double jitter_s = k == 0 ? 0.0 : rng.uniform(-0.05, 0.05);
            const auto start = size_t(std::llround((t + jitter_s) * p.sample_rate));
            const auto stop = size_t(std::llround((t + speech_len) * p.sample_rate));
            if (stop > start && stop <= n) voiced.emplace_back(start, stop - start);
            t += speech_len + pause_len;
        }
    }

    for (const auto& [start, len] : voiced)
        if (len > size_t(p.sample_rate) / 50) render_voiced(clip.samples, start, len, p, rng);

    // Scale speech to a fixed working level, then add the noise floor.
    double speech_rms = rms(clip.samples);
    if (speech_rms > 0) {
        const double gain = 0.12 / speech_rms;
        for (auto& s : clip.samples) s *= gain;
    }
    const double noise_sd = 0.12 * p.noise_level;
    for (auto& s : clip.samples) s = std::clamp(s + rng.normal(0.0, noise_sd), -1.0, 1.0);
    return clip;
}

namespace {

std::string format_short(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 5);
    (void)ec;
    return std::string(buf, ptr);
}

void write_deep_matrix(const std::filesystem::path& path, const SampleMeta& meta,
                       const SynthConfig& cfg, double severity_effect, size_t task_index,
                       Rng& rng) {
    const auto win = size_t(std::llround(cfg.deep_window_s * 1000));
    const auto hop = std::max<size_t>(1, size_t(std::llround(cfg.deep_hop_s * 1000)));
    const auto dur_ms = size_t(std::llround(meta.duration_s * 1000));
    const size_t rows = dur_ms > win ? (dur_ms - win) / hop + 1 : 1;

    std::string text;
    text.reserve(rows * cfg.deep_dims * 8);
    for (size_t r = 0; r < rows; ++r) {
        for (size_t d = 0; d < cfg.deep_dims; ++d) {
            const double dd = double(d);
            const double base = 0.3 * std::sin(0.013 * dd * double(task_index + 1));
            const double signal = severity_effect * std::sin(0.007 * dd + 1.1);
            const double v = base + signal + 0.05 * rng.normal();
            if (d > 0) text += ',';
            text += format_short(v);
        }
        text += '\n';
    }
    atomic_write_text(path, text);
}

} // namespace

std::vector<SampleMeta> synth_corpus(const std::filesystem::path& out_dir, const SynthConfig& cfg,
                                     uint64_t seed) {
    if (cfg.n_subjects == 0 || cfg.tasks_per_subject == 0)
        throw ConfigError("corpus needs at least one subject and task");
    if (cfg.coupling < 0.0 || cfg.coupling > 1.0) throw ConfigError("coupling outside [0, 1]");
    if (cfg.tasks_per_subject > all_tasks().size())
        throw ConfigError("at most " + std::to_string(all_tasks().size()) + " tasks available");

    namespace fs = std::filesystem;
    fs::create_directories(out_dir / "audio");
    if (cfg.emit_deep) fs::create_directories(out_dir / "deep");

    std::vector<SampleMeta> metas;
    const auto tasks = all_tasks();

    for (size_t s = 0; s < cfg.n_subjects; ++s) {
        Rng subj_rng(Rng::derive(seed, s));
        char id_buf[16];
        std::snprintf(id_buf, sizeof(id_buf), "S%03zu", s + 1);
        const std::string subject_id = id_buf;

        const Gender gender = s % 2 == 0 ? Gender::Male : Gender::Female;
        const double base_f0 = gender == Gender::Male ? subj_rng.normal(120.0, 8.0)
                                                      : subj_rng.normal(205.0, 12.0);
        const int phq8 = int(subj_rng.uniform_u64(25));
        const double effect = cfg.coupling * double(phq8) / 24.0;

        for (size_t t = 0; t < cfg.tasks_per_subject; ++t) {
            UtteranceParams p;
            p.sample_rate = cfg.sample_rate;
            p.duration_s = cfg.base_duration_s +
                           cfg.duration_spread_s * subj_rng.uniform(-1.0, 1.0) + 0.8 * effect;
            p.f0_hz = base_f0 * (1.0 - 0.12 * effect) * (1.0 + 0.02 * subj_rng.uniform(-1.0, 1.0));
            p.jitter = 0.006 + 0.022 * effect;
            p.shimmer = 0.04 + 0.10 * effect;
            p.pause_fraction = std::min(0.75, 0.04 + 0.36 * effect);
            p.noise_level = cfg.noise_level * (1.0 + 1.5 * effect);

            SampleMeta meta;
            meta.subject_id = subject_id;
            meta.gender = gender;
            meta.task = tasks[t];
            meta.phq8 = phq8;
            meta.sample_id = subject_id + "_" + to_string(meta.task);
            meta.duration_s = p.duration_s;

            const uint64_t clip_seed = Rng::derive(seed, s * 1000 + t + 1);
            const AudioClip clip = synth_utterance(p, clip_seed);
            write_wav(out_dir / "audio" / (meta.sample_id + ".wav"), clip);
            meta.duration_s = clip.duration_s();

            if (cfg.emit_deep) {
                Rng deep_rng(Rng::derive(clip_seed, 99));
                write_deep_matrix(out_dir / "deep" / (meta.sample_id + ".csv"), meta, cfg, effect,
                                  t, deep_rng);
            }
            metas.push_back(std::move(meta));
        }
    }

    CsvTable table;
    table.header = {"sample_id", "subject_id", "gender", "task", "phq8", "duration_s"};
    for (const auto& m : metas)
        table.rows.push_back({m.sample_id, m.subject_id, to_string(m.gender), to_string(m.task),
                              std::to_string(m.phq8), format_double(m.duration_s)});
    write_csv(out_dir / "metadata.csv", table);
    return metas;
}

} // namespace phq
