#include "phq/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "phq/csv.hpp"

namespace phq {

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xfffe;

uint32_t read_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t read_u16(const uint8_t* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& s, uint32_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
    s.push_back(static_cast<char>((v >> 16) & 0xff));
    s.push_back(static_cast<char>((v >> 24) & 0xff));
}
void put_u16(std::string& s, uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
}

} // namespace

AudioClip load_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DecodeError("cannot open WAV file: " + path.string());
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw DecodeError("not a RIFF/WAVE file: " + path.string());

    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t sample_rate = 0;
    bool have_fmt = false;
    const uint8_t* data = nullptr;
    size_t data_len = 0;

    size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const uint8_t* chunk = bytes.data() + pos;
        uint32_t chunk_size = read_u32(chunk + 4);
        size_t body = pos + 8;
        if (body + chunk_size > bytes.size()) {
            // Tolerate a truncated final chunk only for data.
            if (std::memcmp(chunk, "data", 4) != 0)
                throw DecodeError("truncated chunk in WAV file: " + path.string());
            chunk_size = static_cast<uint32_t>(bytes.size() - body);
        }
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (chunk_size < 16) throw DecodeError("fmt chunk too small: " + path.string());
            format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            sample_rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            if (format == kFormatExtensible && chunk_size >= 26)
                format = read_u16(bytes.data() + body + 24); // first 2 bytes of SubFormat GUID
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            data = bytes.data() + body;
            data_len = chunk_size;
        }
        pos = body + chunk_size + (chunk_size & 1); // chunks are word-aligned
    }

    if (!have_fmt) throw DecodeError("missing fmt chunk: " + path.string());
    if (channels < 1 || channels > 2)
        throw UnsupportedFormatError("unsupported channel count " + std::to_string(channels));
    if (sample_rate == 0) throw DecodeError("zero sample rate: " + path.string());
    bool pcm16 = format == kFormatPcm && bits == 16;
    bool f32 = format == kFormatFloat && bits == 32;
    if (!pcm16 && !f32)
        throw UnsupportedFormatError("unsupported codec (format " + std::to_string(format) +
                                     ", " + std::to_string(bits) + " bits)");
    if (data == nullptr || data_len == 0) throw EmptyInputError("WAV has no audio data: " + path.string());

    size_t bytes_per_sample = bits / 8;
    size_t frame_bytes = bytes_per_sample * channels;
    size_t n_frames = data_len / frame_bytes;
    if (n_frames == 0) throw EmptyInputError("WAV has no complete frames: " + path.string());

    AudioClip clip;
    clip.sample_rate = static_cast<int>(sample_rate);
    clip.id = path.stem().string();
    clip.samples.resize(n_frames);
    for (size_t i = 0; i < n_frames; ++i) {
        double acc = 0.0;
        for (size_t ch = 0; ch < channels; ++ch) {
            const uint8_t* p = data + i * frame_bytes + ch * bytes_per_sample;
            if (pcm16) {
                int16_t v;
                std::memcpy(&v, p, 2);
                acc += static_cast<double>(v) / 32768.0;
            } else {
                float v;
                std::memcpy(&v, p, 4);
                acc += static_cast<double>(v);
            }
        }
        clip.samples[i] = acc / channels;
    }
    return clip;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
    if (clip.samples.empty()) throw EmptyInputError("refusing to write empty clip");
    if (clip.sample_rate <= 0) throw DataError("invalid sample rate");

    uint32_t n = static_cast<uint32_t>(clip.samples.size());
    uint32_t data_bytes = n * 2;
    std::string out;
    out.reserve(44 + data_bytes);
    out += "RIFF";
    put_u32(out, 36 + data_bytes);
    out += "WAVEfmt ";
    put_u32(out, 16);
    put_u16(out, kFormatPcm);
    put_u16(out, 1); // mono
    put_u32(out, static_cast<uint32_t>(clip.sample_rate));
    put_u32(out, static_cast<uint32_t>(clip.sample_rate) * 2);
    put_u16(out, 2);  // block align
    put_u16(out, 16); // bits
    out += "data";
    put_u32(out, data_bytes);
    for (double s : clip.samples) {
        double scaled = std::lround(s * 32768.0);
        int16_t v = static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
        put_u16(out, static_cast<uint16_t>(v));
    }
    atomic_write_text(path, out);
}

double rms(std::span<const double> samples) {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (double s : samples) acc += s * s;
    return std::sqrt(acc / static_cast<double>(samples.size()));
}

AudioClip normalize_dbfs(const AudioClip& clip, double target_dbfs, bool* clipped) {
    if (clipped) *clipped = false;
    if (clip.samples.empty()) throw EmptyInputError("cannot normalize empty clip");
    double current = rms(clip.samples);
    if (current <= 0.0) throw DataError("cannot normalize all-zero signal");
    double target = std::pow(10.0, target_dbfs / 20.0);
    double gain = target / current;
    AudioClip out = clip;
    bool any_clipped = false;
    for (double& s : out.samples) {
        s *= gain;
        if (s > 1.0) { s = 1.0; any_clipped = true; }
        if (s < -1.0) { s = -1.0; any_clipped = true; }
    }
    if (clipped) *clipped = any_clipped;
    return out;
}

} // namespace phq
