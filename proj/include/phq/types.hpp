#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "phq/errors.hpp"

namespace phq {

// Mono PCM signal, amplitudes in [-1, 1].
struct AudioClip {
    std::vector<double> samples;
    int sample_rate = 0;
    std::string id;

    size_t size() const { return samples.size(); }
    double duration_s() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

enum class Gender { Male, Female, Other };
enum class Task { Phoneme, PhonemicFluency, PictureDescription, SemanticFluency, PromptedNarrative };

std::string to_string(Gender g);
std::string to_string(Task t);
Gender gender_from_string(const std::string& s);
Task task_from_string(const std::string& s);
const std::vector<Task>& all_tasks();

// One row of dataset metadata.
struct SampleMeta {
    std::string sample_id;
    std::string subject_id;
    Gender gender = Gender::Other;
    Task task = Task::Phoneme;
    int phq8 = 0; // 0..24
    double duration_s = 0.0;
};

// Dense row-major numeric table with named columns and per-row sample ids.
struct FeatureMatrix {
    std::vector<std::string> sample_ids; // one per row
    std::vector<std::string> names;      // one per column
    std::vector<double> values;          // rows() * cols(), row-major

    size_t rows() const { return sample_ids.size(); }
    size_t cols() const { return names.size(); }

    double& at(size_t r, size_t c) { return values[r * cols() + c]; }
    double at(size_t r, size_t c) const { return values[r * cols() + c]; }

    std::span<const double> row(size_t r) const {
        return std::span<const double>(values.data() + r * cols(), cols());
    }
    std::vector<double> column(size_t c) const {
        std::vector<double> out(rows());
        for (size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
        return out;
    }

    void check_rectangular() const {
        if (values.size() != rows() * cols())
            throw ShapeError("feature matrix storage does not match rows*cols");
    }
};

} // namespace phq
