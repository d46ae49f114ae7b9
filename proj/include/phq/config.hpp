#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "phq/enhance.hpp"
#include "phq/evaluation.hpp"
#include "phq/features.hpp"
#include "phq/models.hpp"
#include "phq/synth.hpp"

namespace phq {

// Everything a pipeline run depends on, loadable from one JSON file so a
// config plus a seed pins the whole experiment.
struct PipelineConfig {
    // inputs and outputs (paths are resolved relative to the config file)
    std::string metadata_csv = "corpus/metadata.csv";
    std::string audio_dir = "corpus/audio";
    std::string deep_dir;               // optional, enables the deep track
    std::string features_csv = "out/features.csv";
    std::string raw_features_csv;       // optional pair for the enhancement
    std::string enhanced_features_csv;  // significance comparison

    // signal chain
    double target_dbfs = -20.0;
    bool enhance = true;
    EnhancementConfig enhancement;
    FeatureConfig features;
    std::string manifest_path = "data/feature_manifest_v1.txt";

    // selection and evaluation
    std::string feature_source = "conventional"; // "conventional" | "deep"
    std::vector<std::string> task_filter;        // empty = keep every task
    double select_fraction = 0.1;
    size_t n_folds = 5;
    size_t inner_folds = 5;
    bool clamp_predictions = false;
    std::string gender_mode = "separate"; // "separate" | "sliced"
    std::vector<std::string> families = {"svr", "forest", "fnn"};

    // hyperparameter grids
    std::vector<double> svr_c_grid = {0.1, 1.0, 10.0, 100.0};
    std::vector<double> svr_gamma_grid = {1e-4, 1e-3, 1e-2, 1e-1};
    double svr_epsilon = 0.1;
    std::vector<size_t> forest_trees_grid = {100, 300};
    std::vector<size_t> forest_depth_grid = {8, 16, kNoDepthLimit};
    FnnConfig fnn;

    SynthConfig synth;

    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
    void validate() const;

    // Stable fingerprint of the canonical JSON form.
    std::string hash() const;

    FamilyGrid grid_for(const std::string& family) const;
    CvOptions cv_options(uint64_t seed) const;
};

} // namespace phq
