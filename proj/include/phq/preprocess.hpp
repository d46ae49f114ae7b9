#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace phq {

// Per-feature z-scoring with train-set statistics (population sigma).
// Zero-variance features transform to 0 rather than dividing by sigma.
class Standardizer {
  public:
    void fit(const std::vector<double>& values, size_t rows, size_t cols);
    std::vector<double> transform(const std::vector<double>& values, size_t rows) const;
    std::vector<double> fit_transform(const std::vector<double>& values, size_t rows, size_t cols);

    bool fitted() const { return !mean_.empty(); }
    size_t cols() const { return mean_.size(); }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& sigma() const { return sigma_; }

  private:
    std::vector<double> mean_;
    std::vector<double> sigma_;
};

double pearson_correlation(std::span<const double> a, std::span<const double> b);

struct MrmrResult {
    std::vector<size_t> selected;       // column indices in selection order
    std::vector<double> relevance;      // |r(feature, target)| for every column
    std::vector<double> score_at_pick;  // criterion value of each pick
};

// Quotient-form minimum-redundancy maximum-relevance forward selection:
// pick argmax relevance / mean |r| to already-selected columns. The first
// pick uses redundancy 1 so the score is pure relevance; ties go to the
// lower column index.
MrmrResult mrmr_select(const std::vector<double>& values, size_t rows, size_t cols,
                       const std::vector<double>& target, size_t k);

// ceil(fraction * cols), clamped to [1, cols]
size_t selection_count(size_t cols, double fraction);

} // namespace phq
