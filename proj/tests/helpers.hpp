#pragma once

// Shared test fixtures. The WAV writer here is deliberately independent of
// src/audio.cpp so the decoder is checked against a second implementation.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testutil {

inline void put_u16(std::string& s, uint16_t v) {
    s.push_back(char(v & 0xff));
    s.push_back(char((v >> 8) & 0xff));
}

inline void put_u32(std::string& s, uint32_t v) {
    put_u16(s, uint16_t(v & 0xffff));
    put_u16(s, uint16_t(v >> 16));
}

inline std::string riff_container(uint16_t format_code, int channels, int sample_rate,
                                  int bytes_per_sample, const std::string& data) {
    std::string s;
    s += "RIFF";
    put_u32(s, uint32_t(36 + data.size()));
    s += "WAVEfmt ";
    put_u32(s, 16);
    put_u16(s, format_code);
    put_u16(s, uint16_t(channels));
    put_u32(s, uint32_t(sample_rate));
    put_u32(s, uint32_t(sample_rate * channels * bytes_per_sample));
    put_u16(s, uint16_t(channels * bytes_per_sample));
    put_u16(s, uint16_t(8 * bytes_per_sample));
    s += "data";
    put_u32(s, uint32_t(data.size()));
    s += data;
    return s;
}

// Interleaved samples, little-endian PCM16.
inline std::string wav_bytes_pcm16(const std::vector<int16_t>& samples, int sample_rate,
                                   int channels) {
    std::string data;
    for (int16_t v : samples) put_u16(data, uint16_t(v));
    return riff_container(1, channels, sample_rate, 2, data);
}

inline std::string wav_bytes_f32(const std::vector<float>& samples, int sample_rate,
                                 int channels) {
    std::string data;
    for (float v : samples) {
        uint32_t bits = 0;
        std::memcpy(&bits, &v, 4);
        put_u32(data, bits);
    }
    return riff_container(3, channels, sample_rate, 4, data);
}

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
    if (!p.parent_path().empty()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), std::streamsize(bytes.size()));
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

// Scratch directory removed when the object dies.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("phqtest_" + tag + "_" + std::to_string(++counter));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

  private:
    std::filesystem::path path_;
};

inline std::vector<double> sine(double freq, double seconds, int sr, double amp = 0.5,
                                double phase = 0.0) {
    std::vector<double> v(size_t(seconds * sr));
    for (size_t i = 0; i < v.size(); ++i)
        v[i] = amp * std::sin(2.0 * M_PI * freq * double(i) / sr + phase);
    return v;
}

// mt19937_64 is pinned by the standard; the [0,1) mapping is spelled out so
// the stream never depends on libstdc++'s distribution internals.
inline std::vector<double> white_noise(size_t n, double amp, uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = amp * (2.0 * ((eng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0);
    return v;
}

inline double rms_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return v.empty() ? 0.0 : std::sqrt(acc / double(v.size()));
}

} // namespace testutil
