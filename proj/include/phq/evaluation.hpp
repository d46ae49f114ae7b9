#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "phq/folds.hpp"
#include "phq/models.hpp"
#include "phq/preprocess.hpp"
#include "phq/stats.hpp"
#include "phq/timing.hpp"
#include "phq/types.hpp"

namespace phq {

// One model family plus the hyperparameter grid searched per fold.
struct FamilyGrid {
    std::string family; // "svr" | "forest" | "fnn"
    std::vector<SvrConfig> svr;
    std::vector<ForestConfig> forest;
    std::vector<FnnConfig> fnn;

    size_t size() const;
    std::unique_ptr<Regressor> make(size_t index) const;
    std::string describe(size_t index) const;
};

struct CvOptions {
    size_t n_folds = 5;
    size_t inner_folds = 5;
    uint64_t seed = 0;
    double select_fraction = 0.1;
    bool clamp_predictions = false; // clamp to the PHQ-8 range [0, 24]
};

struct InnerSearch {
    std::vector<std::vector<double>> fold_rmse; // grid point x inner fold
    std::vector<double> mean_rmse;
    size_t best_index = 0;
};

struct FittedFold {
    Standardizer standardizer;
    std::vector<size_t> selected; // column indices into the raw feature space
    std::unique_ptr<Regressor> model;
    InnerSearch search;
    double preprocess_seconds = 0.0;
    double train_seconds = 0.0;
};

std::vector<double> take_columns(const std::vector<double>& X, size_t rows, size_t cols,
                                 const std::vector<size_t>& selected);

// Fits preprocessing and one grid-searched model on a training split. Throws
// LeakageError if any training subject also appears in test_subjects.
FittedFold fit_fold(const std::vector<double>& train_X, size_t cols,
                    const std::vector<double>& train_y,
                    const std::vector<SampleMeta>& train_meta,
                    const std::vector<std::string>& test_subjects, const FamilyGrid& grid,
                    const CvOptions& opt);

struct FoldOutcome {
    std::vector<size_t> test_rows;
    std::vector<size_t> selected;
    size_t grid_index = 0;
    InnerSearch search;
    double rmse = 0.0;
    double mae = 0.0;
    std::vector<double> standardizer_mean;  // train-fold stats over all columns
    std::vector<double> standardizer_sigma;
};

struct CvResult {
    std::vector<double> predictions; // aligned with metadata rows
    std::vector<FoldOutcome> folds;
    double rmse = 0.0;
    double mae = 0.0;
    double ccc_value = 0.0;
    StageTimes times; // preprocess/train/predict filled here, load by caller
};

// Outer subject-independent CV; every sample is predicted exactly once by the
// fold that holds it out. plan_override replaces the internally built folds.
CvResult evaluate_cv(const std::vector<double>& X, size_t rows, size_t cols,
                     const std::vector<double>& y, const std::vector<SampleMeta>& meta,
                     const FamilyGrid& grid, const CvOptions& opt,
                     const FoldPlan* plan_override = nullptr);

struct MetricRow {
    double rmse = 0.0;
    double mae = 0.0;
    size_t n = 0;
};
MetricRow metrics_for_rows(const std::vector<double>& y, const std::vector<double>& pred,
                           const std::vector<size_t>& rows);

// Paired comparison of absolute errors under m-way Bonferroni correction.
struct SignificanceReport {
    WilcoxonResult wilcoxon;
    double bonferroni_p = 1.0;
    double mean_abs_err_a = 0.0;
    double mean_abs_err_b = 0.0;
};
SignificanceReport compare_abs_errors(const std::vector<double>& y,
                                      const std::vector<double>& pred_a,
                                      const std::vector<double>& pred_b, size_t m_comparisons);

std::vector<double> abs_errors(const std::vector<double>& y, const std::vector<double>& pred);

} // namespace phq
