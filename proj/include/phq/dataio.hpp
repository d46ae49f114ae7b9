#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "phq/types.hpp"

namespace phq {

// metadata.csv: sample_id,subject_id,gender,task,phq8,duration_s
std::vector<SampleMeta> load_metadata(const std::filesystem::path& path);
void save_metadata(const std::filesystem::path& path, const std::vector<SampleMeta>& metas);

// Feature CSV: header sample_id,<feature names...>, one row per sample.
void save_feature_matrix(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix load_feature_matrix(const std::filesystem::path& path);

// Imputation flags sidecar: sample_id,flagged_entry rows.
using FlagMap = std::map<std::string, std::vector<std::string>>;
void save_flags(const std::filesystem::path& path, const FlagMap& flags);
FlagMap load_flags(const std::filesystem::path& path);

} // namespace phq
