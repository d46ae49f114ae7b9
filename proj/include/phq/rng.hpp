#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace phq {

// Seedable generator with hand-rolled distributions so that identical seeds
// give identical streams on every platform (std:: distributions are
// implementation-defined).
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform integer in [0, bound). Modulo bias is negligible for bound << 2^64.
    uint64_t uniform_u64(uint64_t bound) { return bound ? engine_() % bound : 0; }

    // Uniform real in [0, 1).
    double uniform() {
        return (engine_() >> 11) * (1.0 / 9007199254740992.0); // 53-bit mantissa
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller with one cached deviate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 <= 1e-300) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_u64(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Derive an independent stream (e.g. one per tree / per clip).
    static uint64_t derive(uint64_t seed, uint64_t index) {
        uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace phq
