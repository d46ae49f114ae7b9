#pragma once

#include <cstddef>
#include <span>

namespace phq {

double mean_of(std::span<const double> v);
double rmse(std::span<const double> y_true, std::span<const double> y_pred);
double mae(std::span<const double> y_true, std::span<const double> y_pred);

// Concordance correlation coefficient on population moments. A degenerate
// denominator (both sequences constant with equal means) yields 0.
double ccc(std::span<const double> a, std::span<const double> b);

double normal_cdf(double z);

// Regularized incomplete beta I_x(a, b) via Lentz continued fraction.
double incomplete_beta(double a, double b, double x);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
    bool degenerate = false; // zero pooled variance
};
// Two-sided independent two-sample t-test with pooled variance.
TTestResult t_test_independent(std::span<const double> a, std::span<const double> b);

struct WilcoxonResult {
    double w = 0.0;          // min(W+, W-)
    double p = 1.0;          // two-sided
    size_t n_effective = 0;  // pairs left after dropping zero differences
    bool exact = false;
    bool degenerate = false; // every difference was zero
};
// Paired signed-rank test: exact sign-flip distribution for n <= 25 (integer
// DP over doubled ranks, so tied averages stay exact), normal approximation
// with tie and continuity corrections above that.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

double bonferroni(double p, size_t m);

} // namespace phq
