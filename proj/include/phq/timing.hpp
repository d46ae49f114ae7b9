#pragma once

#include <chrono>

namespace phq {

class Stopwatch {
  public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    void restart() { start_ = std::chrono::steady_clock::now(); }
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

// Wall-clock seconds per pipeline stage, one instance per track.
struct StageTimes {
    double load = 0.0;
    double preprocess = 0.0;
    double train = 0.0;
    double predict = 0.0;

    double total() const { return load + preprocess + train + predict; }
};

// Peak resident set size of this process in megabytes (0 if unavailable).
double peak_rss_mb();

} // namespace phq
