#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phq/types.hpp"

namespace phq {

// Severity band of a PHQ-8 score: [0,4] [5,9] [10,14] [15,24].
int severity_bin(int phq8);

struct FoldPlan {
    size_t n_folds = 0;
    std::vector<int> sample_fold;                      // per metadata row
    std::vector<std::vector<size_t>> test_rows;        // row indices per fold
    std::vector<std::vector<std::string>> fold_subjects;
};

// Subject-independent severity-stratified assignment: subjects are binned by
// their max PHQ-8, each bin is shuffled with a bin-derived seed, and a single
// round-robin pointer walks bins in order so fold sizes stay balanced.
FoldPlan make_folds(const std::vector<SampleMeta>& meta, size_t n_folds, uint64_t seed);

} // namespace phq
