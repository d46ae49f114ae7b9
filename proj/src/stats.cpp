#include "phq/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "phq/errors.hpp"

namespace phq {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("paired inputs differ in length");
    if (a.empty()) throw InsufficientDataError("empty input");
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-14) break;
    }
    return h;
}

} // namespace

double mean_of(std::span<const double> v) {
    if (v.empty()) throw InsufficientDataError("mean of empty input");
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / double(v.size());
}

double rmse(std::span<const double> y_true, std::span<const double> y_pred) {
    check_pair(y_true, y_pred);
    double acc = 0.0;
    for (size_t i = 0; i < y_true.size(); ++i) {
        const double d = y_true[i] - y_pred[i];
        acc += d * d;
    }
    return std::sqrt(acc / double(y_true.size()));
}

double mae(std::span<const double> y_true, std::span<const double> y_pred) {
    check_pair(y_true, y_pred);
    double acc = 0.0;
    for (size_t i = 0; i < y_true.size(); ++i) acc += std::abs(y_true[i] - y_pred[i]);
    return acc / double(y_true.size());
}

double ccc(std::span<const double> a, std::span<const double> b) {
    check_pair(a, b);
    const size_t n = a.size();
    const double ma = mean_of(a), mb = mean_of(b);
    double va = 0.0, vb = 0.0, cov = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        va += da * da;
        vb += db * db;
        cov += da * db;
    }
    va /= double(n);
    vb /= double(n);
    cov /= double(n);
    const double denom = va + vb + (ma - mb) * (ma - mb);
    if (denom <= 0.0) return 0.0;
    return 2.0 * cov / denom;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw ConfigError("incomplete beta needs positive parameters");
    if (x < 0.0 || x > 1.0) throw ConfigError("incomplete beta argument outside [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

TTestResult t_test_independent(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw InsufficientDataError("t-test needs at least 2 samples per group");
    const double n1 = double(a.size()), n2 = double(b.size());
    const double m1 = mean_of(a), m2 = mean_of(b);

    double ss1 = 0.0, ss2 = 0.0;
    for (double x : a) ss1 += (x - m1) * (x - m1);
    for (double x : b) ss2 += (x - m2) * (x - m2);

    TTestResult res;
    res.df = n1 + n2 - 2.0;
    const double pooled = (ss1 + ss2) / res.df;
    const double denom = std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
    if (denom <= 0.0) {
        res.degenerate = true;
        if (m1 == m2) return res; // t = 0, p = 1
        res.t = m1 > m2 ? std::numeric_limits<double>::infinity()
                        : -std::numeric_limits<double>::infinity();
        res.p = 0.0;
        return res;
    }
    res.t = (m1 - m2) / denom;
    res.p = incomplete_beta(res.df / 2.0, 0.5, res.df / (res.df + res.t * res.t));
    return res;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
    check_pair(a, b);

    std::vector<double> diffs;
    diffs.reserve(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) diffs.push_back(d);
    }

    WilcoxonResult res;
    res.n_effective = diffs.size();
    if (diffs.empty()) {
        res.degenerate = true; // all ties: no evidence either way
        return res;
    }

    const size_t n = diffs.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
        return std::abs(diffs[i]) < std::abs(diffs[j]);
    });

    // Doubled average ranks stay integral even through tie groups.
    std::vector<long> rank2(n, 0);
    std::vector<size_t> tie_sizes;
    for (size_t i = 0; i < n;) {
        size_t j = i;
        while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
        const long r2 = long(i + 1) + long(j + 1); // 2 * average of ranks i+1 .. j+1
        for (size_t k = i; k <= j; ++k) rank2[order[k]] = r2;
        tie_sizes.push_back(j - i + 1);
        i = j + 1;
    }

    long w_plus2 = 0, w_minus2 = 0;
    for (size_t i = 0; i < n; ++i)
        (diffs[i] > 0.0 ? w_plus2 : w_minus2) += rank2[i];
    const long w_min2 = std::min(w_plus2, w_minus2);
    res.w = double(w_min2) / 2.0;

    if (n <= 25) {
        res.exact = true;
        const long total2 = long(n) * long(n + 1); // sum of doubled ranks
        std::vector<double> dp(size_t(total2) + 1, 0.0);
        dp[0] = 1.0;
        long reach = 0;
        for (size_t i = 0; i < n; ++i) {
            reach += rank2[i];
            for (long s = reach; s >= rank2[i]; --s) dp[size_t(s)] += dp[size_t(s - rank2[i])];
        }
        double count_le = 0.0;
        for (long s = 0; s <= w_min2; ++s) count_le += dp[size_t(s)];
        const double p_one = count_le / std::pow(2.0, double(n));
        res.p = std::min(1.0, 2.0 * p_one);
        return res;
    }

    const double nd = double(n);
    const double mu = nd * (nd + 1.0) / 4.0;
    double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0;
    for (size_t t : tie_sizes) {
        const double td = double(t);
        var -= (td * td * td - td) / 48.0;
    }
    if (var <= 0.0) return res; // every difference tied at one magnitude
    const double z = (res.w - mu + 0.5) / std::sqrt(var);
    res.p = std::clamp(2.0 * normal_cdf(z), 0.0, 1.0);
    return res;
}

double bonferroni(double p, size_t m) { return std::min(1.0, p * double(m)); }

} // namespace phq
