#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace phq {

// Per-sample matrix of windowed deep representations: rows are analysis
// windows, columns are representation dimensions.
struct DeepFeatureMatrix {
    std::string sample_id;
    size_t dims = 0;
    std::vector<double> values; // row-major, rows() x dims

    size_t rows() const { return dims == 0 ? 0 : values.size() / dims; }
    double at(size_t r, size_t c) const { return values[r * dims + c]; }
};

// Reads a whitespace- or comma-separated numeric matrix. Every row must have
// the same width; the sample id is the file stem.
DeepFeatureMatrix ingest_deep_features(const std::filesystem::path& path);

// Clip-level vector: per-dimension mean followed by per-dimension population
// standard deviation, so k dims become 2k features.
std::vector<double> aggregate_deep(const DeepFeatureMatrix& m);

std::vector<std::string> deep_feature_names(size_t dims);

} // namespace phq
