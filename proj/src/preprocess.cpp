#include "phq/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "phq/errors.hpp"
#include "phq/stats.hpp"

namespace phq {

void Standardizer::fit(const std::vector<double>& values, size_t rows, size_t cols) {
    if (cols == 0) throw ShapeError("cannot fit standardizer on empty matrix");
    if (rows < 2) throw InsufficientDataError("standardizer needs at least 2 training rows");
    if (values.size() != rows * cols) throw ShapeError("matrix size does not match rows*cols");

    mean_.assign(cols, 0.0);
    sigma_.assign(cols, 0.0);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) mean_[c] += values[r * cols + c];
    for (size_t c = 0; c < cols; ++c) mean_[c] /= double(rows);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) {
            const double d = values[r * cols + c] - mean_[c];
            sigma_[c] += d * d;
        }
    for (size_t c = 0; c < cols; ++c) sigma_[c] = std::sqrt(sigma_[c] / double(rows));
}

std::vector<double> Standardizer::transform(const std::vector<double>& values, size_t rows) const {
    if (!fitted()) throw ShapeError("standardizer not fitted");
    const size_t cols = mean_.size();
    if (values.size() != rows * cols) throw ShapeError("matrix width differs from fitted width");

    std::vector<double> out(values.size());
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) {
            const size_t i = r * cols + c;
            out[i] = sigma_[c] > 0.0 ? (values[i] - mean_[c]) / sigma_[c] : 0.0;
        }
    return out;
}

std::vector<double> Standardizer::fit_transform(const std::vector<double>& values, size_t rows,
                                                size_t cols) {
    fit(values, rows, cols);
    return transform(values, rows);
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("correlation inputs differ in length");
    if (a.size() < 2) throw InsufficientDataError("correlation needs at least 2 points");

    const size_t n = a.size();
    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= double(n);
    mb /= double(n);

    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

size_t selection_count(size_t cols, double fraction) {
    if (cols == 0) throw ShapeError("no columns to select from");
    if (fraction <= 0.0 || fraction > 1.0) throw ConfigError("selection fraction outside (0, 1]");
    const auto k = size_t(std::ceil(fraction * double(cols)));
    return std::clamp<size_t>(k, 1, cols);
}

MrmrResult mrmr_select(const std::vector<double>& values, size_t rows, size_t cols,
                       const std::vector<double>& target, size_t k) {
    if (rows == 0 || cols == 0) throw ShapeError("cannot select from empty matrix");
    if (values.size() != rows * cols) throw ShapeError("matrix size does not match rows*cols");
    if (target.size() != rows) throw ShapeError("target length does not match rows");
    if (k == 0 || k > cols) throw ConfigError("selection count outside [1, cols]");
    {
        const double m = mean_of(target);
        double var = 0.0;
        for (double t : target) var += (t - m) * (t - m);
        if (var <= 0.0) throw DataError("selection target has zero variance");
    }

    // Column-major copy so per-feature passes are contiguous.
    std::vector<double> col_major(values.size());
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) col_major[c * rows + r] = values[r * cols + c];
    auto column = [&](size_t c) {
        return std::span<const double>(col_major.data() + c * rows, rows);
    };

    MrmrResult res;
    res.relevance.resize(cols);
    for (size_t c = 0; c < cols; ++c)
        res.relevance[c] = std::abs(pearson_correlation(column(c), target));

    // redundancy_sum[c] accumulates |r(c, s)| over selected s; one pass per
    // pick keeps the whole selection O(k * cols * rows).
    std::vector<double> redundancy_sum(cols, 0.0);
    std::vector<char> taken(cols, 0);

    for (size_t step = 0; step < k; ++step) {
        double best_score = -1.0;
        size_t best_col = cols;
        for (size_t c = 0; c < cols; ++c) {
            if (taken[c]) continue;
            const double redundancy = step == 0 ? 1.0 : redundancy_sum[c] / double(step);
            const double score = res.relevance[c] / std::max(redundancy, 1e-12);
            if (score > best_score) { // ties keep the lower index
                best_score = score;
                best_col = c;
            }
        }
        taken[best_col] = 1;
        res.selected.push_back(best_col);
        res.score_at_pick.push_back(best_score);
        if (step + 1 < k) {
            for (size_t c = 0; c < cols; ++c) {
                if (taken[c]) continue;
                redundancy_sum[c] += std::abs(pearson_correlation(column(c), column(best_col)));
            }
        }
    }
    return res;
}

} // namespace phq
