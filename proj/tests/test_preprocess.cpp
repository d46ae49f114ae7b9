#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "phq/errors.hpp"
#include "phq/preprocess.hpp"

using namespace phq;

namespace {

std::vector<double> random_matrix(size_t rows, size_t cols, uint64_t seed, double lo = -5.0,
                                  double hi = 5.0) {
    std::mt19937_64 eng(seed);
    std::vector<double> m(rows * cols);
    for (auto& v : m) v = lo + (hi - lo) * ((eng() >> 11) * (1.0 / 9007199254740992.0));
    return m;
}

double naive_corr(const std::vector<double>& a, const std::vector<double>& b) {
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
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

std::vector<double> column_of(const std::vector<double>& m, size_t rows, size_t cols, size_t c) {
    std::vector<double> out(rows);
    for (size_t r = 0; r < rows; ++r) out[r] = m[r * cols + c];
    return out;
}

// Forward selection recomputing every correlation from scratch each step.
std::vector<size_t> brute_force_mrmr(const std::vector<double>& m, size_t rows, size_t cols,
                                     const std::vector<double>& y, size_t k) {
    std::vector<size_t> picked;
    while (picked.size() < k) {
        double best = -1.0;
        size_t arg = cols;
        for (size_t c = 0; c < cols; ++c) {
            if (std::find(picked.begin(), picked.end(), c) != picked.end()) continue;
            const double rel = std::abs(naive_corr(column_of(m, rows, cols, c), y));
            double red = 1.0;
            if (!picked.empty()) {
                red = 0.0;
                for (size_t s : picked)
                    red += std::abs(
                        naive_corr(column_of(m, rows, cols, c), column_of(m, rows, cols, s)));
                red /= double(picked.size());
            }
            const double score = rel / std::max(red, 1e-12);
            if (score > best) {
                best = score;
                arg = c;
            }
        }
        picked.push_back(arg);
    }
    return picked;
}

} // namespace

TEST_CASE("standardized columns have zero mean and unit sigma") {
    const size_t rows = 40, cols = 7;
    const auto m = random_matrix(rows, cols, 5);
    Standardizer st;
    const auto z = st.fit_transform(m, rows, cols);

    for (size_t c = 0; c < cols; ++c) {
        double mean = 0.0;
        for (size_t r = 0; r < rows; ++r) mean += z[r * cols + c];
        mean /= double(rows);
        double var = 0.0;
        for (size_t r = 0; r < rows; ++r) {
            const double d = z[r * cols + c] - mean;
            var += d * d;
        }
        var /= double(rows);
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
    }
}

TEST_CASE("fit statistics on a hand-checked column") {
    Standardizer st;
    st.fit({1.0, 3.0}, 2, 1); // mean 2, population sigma 1
    CHECK(st.mean()[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(st.sigma()[0] == doctest::Approx(1.0).epsilon(1e-15));

    const auto z = st.transform({5.0}, 1);
    CHECK(z[0] == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("constant columns transform to zero") {
    // col 0 constant, col 1 varies
    const std::vector<double> m = {4.0, 1.0, 4.0, 2.0, 4.0, 3.0};
    Standardizer st;
    const auto z = st.fit_transform(m, 3, 2);
    CHECK(z[0] == 0.0);
    CHECK(z[2] == 0.0);
    CHECK(z[4] == 0.0);
    CHECK(st.sigma()[0] == 0.0);
    CHECK(z[3] == doctest::Approx(0.0).epsilon(1e-15)); // middle of 1,2,3
}

TEST_CASE("test rows are scaled with train statistics") {
    Standardizer st;
    st.fit({0.0, 10.0, 20.0, 30.0}, 4, 1); // mean 15, sigma sqrt(125)
    const auto z = st.transform({15.0, 40.0}, 2);
    CHECK(z[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(z[1] == doctest::Approx(25.0 / std::sqrt(125.0)).epsilon(1e-12));
}

TEST_CASE("standardizer input contracts") {
    Standardizer st;
    CHECK_THROWS_AS(st.fit({}, 0, 0), ShapeError);
    CHECK_THROWS_AS(st.fit({1.0}, 1, 1), InsufficientDataError);
    CHECK_THROWS_AS(st.fit({1.0, 2.0, 3.0}, 2, 2), ShapeError);
    CHECK_THROWS_AS(st.transform({1.0}, 1), ShapeError); // not fitted
    st.fit({1.0, 2.0}, 2, 1);
    CHECK_THROWS_AS(st.transform({1.0, 2.0, 3.0}, 2), ShapeError);
}

TEST_CASE("pearson correlation on known vectors") {
    const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> y = {2.0, 4.0, 6.0, 8.0};
    CHECK(pearson_correlation(x, y) == doctest::Approx(1.0).epsilon(1e-12));
    for (auto& v : y) v = -v;
    CHECK(pearson_correlation(x, y) == doctest::Approx(-1.0).epsilon(1e-12));

    // orthogonal after centering
    const std::vector<double> a = {-1.0, 0.0, 1.0};
    const std::vector<double> b = {1.0, -2.0, 1.0};
    CHECK(std::abs(pearson_correlation(a, b)) < 1e-12);

    // degenerate: constant input yields 0 by contract
    const std::vector<double> flat = {1.0, 1.0, 1.0};
    const std::vector<double> ramp = {1.0, 2.0, 3.0};
    CHECK(pearson_correlation(flat, ramp) == 0.0);

    // agreement with the naive formula on random data
    const auto u = random_matrix(50, 1, 9);
    const auto v = random_matrix(50, 1, 10);
    CHECK(pearson_correlation(u, v) == doctest::Approx(naive_corr(u, v)).epsilon(1e-12));

    CHECK_THROWS_AS(pearson_correlation(x, a), ShapeError);
    CHECK_THROWS_AS(pearson_correlation(std::vector<double>{1.0}, std::vector<double>{2.0}),
                    InsufficientDataError);
}

TEST_CASE("selection count is a clamped ceiling") {
    CHECK(selection_count(158, 0.1) == 16);
    CHECK(selection_count(10, 0.1) == 1);
    CHECK(selection_count(10, 1.0) == 10);
    CHECK(selection_count(3, 0.5) == 2);
    CHECK(selection_count(1, 0.01) == 1);
    CHECK_THROWS_AS(selection_count(0, 0.1), ShapeError);
    CHECK_THROWS_AS(selection_count(10, 0.0), ConfigError);
    CHECK_THROWS_AS(selection_count(10, 1.5), ConfigError);
}

TEST_CASE("mrmr matches a brute-force reimplementation") {
    const size_t rows = 60, cols = 12, k = 6;
    const auto m = random_matrix(rows, cols, 31);
    std::vector<double> y(rows);
    // target leans on a few columns so relevance varies
    for (size_t r = 0; r < rows; ++r)
        y[r] = 2.0 * m[r * cols + 3] - 1.5 * m[r * cols + 7] + 0.5 * m[r * cols + 0];

    const auto got = mrmr_select(m, rows, cols, y, k);
    const auto ref = brute_force_mrmr(m, rows, cols, y, k);
    REQUIRE(got.selected.size() == k);
    CHECK(got.selected == ref);
    REQUIRE(got.score_at_pick.size() == k);
    CHECK(got.score_at_pick[0] ==
          doctest::Approx(got.relevance[got.selected[0]]).epsilon(1e-12));
    for (size_t c = 0; c < cols; ++c)
        CHECK(got.relevance[c] ==
              doctest::Approx(std::abs(naive_corr(column_of(m, rows, cols, c), y)))
                  .epsilon(1e-12));
}

TEST_CASE("an exact duplicate of the first pick is never chosen second") {
    const size_t rows = 80;
    std::mt19937_64 eng(101);
    auto noise = [&]() { return 0.3 * (2.0 * ((eng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0); };

    std::vector<double> y(rows), f1(rows), f3(rows);
    for (size_t r = 0; r < rows; ++r) {
        y[r] = double(r % 25);
        f1[r] = y[r] + noise();
        f3[r] = noise() * 10.0;
    }
    const std::vector<double> f2 = f1; // exact copy

    std::vector<double> m(rows * 3);
    for (size_t r = 0; r < rows; ++r) {
        m[r * 3 + 0] = f1[r];
        m[r * 3 + 1] = f2[r];
        m[r * 3 + 2] = f3[r];
    }

    const auto res = mrmr_select(m, rows, 3, y, 2);
    CHECK(res.selected[0] == 0); // tie with the copy resolves to the lower index
    CHECK(res.selected[1] == 2); // redundancy 1 with the copy kills its quotient
}

TEST_CASE("mrmr order is invariant to feature scaling") {
    const size_t rows = 50, cols = 8, k = 4;
    const auto m = random_matrix(rows, cols, 77);
    std::vector<double> y(rows);
    for (size_t r = 0; r < rows; ++r) y[r] = m[r * cols + 1] - m[r * cols + 5];

    auto scaled = m;
    const double scales[] = {100.0, 0.001, 7.0, 1.0, 42.0, 0.5, 3.0, 1000.0};
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) scaled[r * cols + c] *= scales[c];

    CHECK(mrmr_select(m, rows, cols, y, k).selected ==
          mrmr_select(scaled, rows, cols, y, k).selected);
}

TEST_CASE("mrmr tracks a permutation of the columns") {
    const size_t rows = 40, cols = 6, k = 3;
    const auto m = random_matrix(rows, cols, 55);
    std::vector<double> y(rows);
    for (size_t r = 0; r < rows; ++r) y[r] = m[r * cols + 2] + 0.5 * m[r * cols + 4];

    const size_t perm[] = {3, 0, 5, 1, 4, 2}; // new column c holds old column perm[c]
    std::vector<double> pm(rows * cols);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) pm[r * cols + c] = m[r * cols + perm[c]];

    const auto base = mrmr_select(m, rows, cols, y, k);
    const auto perd = mrmr_select(pm, rows, cols, y, k);
    for (size_t i = 0; i < k; ++i) CHECK(perm[perd.selected[i]] == base.selected[i]);
}

TEST_CASE("fraction 1.0 selects everything exactly once") {
    const size_t rows = 30, cols = 5;
    const auto m = random_matrix(rows, cols, 13);
    std::vector<double> y(rows);
    for (size_t r = 0; r < rows; ++r) y[r] = m[r * cols];

    const auto res = mrmr_select(m, rows, cols, y, selection_count(cols, 1.0));
    REQUIRE(res.selected.size() == cols);
    auto sorted = res.selected;
    std::sort(sorted.begin(), sorted.end());
    for (size_t c = 0; c < cols; ++c) CHECK(sorted[c] == c);
}

TEST_CASE("mrmr argument contracts") {
    const std::vector<double> m = {1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y = {0.0, 1.0};
    CHECK_THROWS_AS(mrmr_select({}, 0, 0, {}, 1), ShapeError);
    CHECK_THROWS_AS(mrmr_select(m, 2, 2, {1.0}, 1), ShapeError);
    CHECK_THROWS_AS(mrmr_select(m, 2, 2, y, 0), ConfigError);
    CHECK_THROWS_AS(mrmr_select(m, 2, 2, y, 3), ConfigError);
    CHECK_THROWS_AS(mrmr_select(m, 2, 2, {2.5, 2.5}, 1), DataError);

    // single feature: trivially selected
    const auto res = mrmr_select({1.0, 2.0, 3.0}, 3, 1, {1.0, 2.0, 2.5}, 1);
    CHECK(res.selected == std::vector<size_t>{0});
}
