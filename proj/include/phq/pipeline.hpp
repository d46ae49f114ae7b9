#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "phq/config.hpp"

namespace phq {

struct ExtractOutcome {
    size_t extracted = 0;
    size_t reused = 0;
    std::vector<std::string> failures; // "sample_id: reason"
    bool partial() const { return !failures.empty(); }
};

// Decode, normalize, optionally enhance and extract features for every
// metadata row. Existing rows in the output CSV are reused, so interrupted
// extractions resume instead of recomputing.
ExtractOutcome run_extract(const PipelineConfig& cfg, size_t jobs);

struct EnhanceOutcome {
    size_t processed = 0;
    double min_gain = 1.0;
    double max_gain = 0.0;
};
EnhanceOutcome run_enhance(const PipelineConfig& cfg, const std::filesystem::path& out_dir);

// Whole-dataset selection listing (exploratory; CV runs refit per fold).
nlohmann::json run_select(const PipelineConfig& cfg);

struct RunArtifacts {
    nlohmann::json report;  // deterministic: no wall-clock content
    nlohmann::json timings; // wall-clock stage table, written separately
};

RunArtifacts run_pipeline(const PipelineConfig& cfg, uint64_t seed);
RunArtifacts run_benchmark(const PipelineConfig& cfg, uint64_t seed);

std::string render_run_markdown(const nlohmann::json& report);
std::string render_benchmark_markdown(const nlohmann::json& report, const nlohmann::json& timings);

int cli_main(int argc, char** argv);

} // namespace phq
