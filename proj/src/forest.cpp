#include <algorithm>
#include <cmath>
#include <numeric>

#include "phq/errors.hpp"
#include "phq/models.hpp"
#include "phq/rng.hpp"

namespace phq {

int ForestModel::build_node(const std::vector<double>& X, size_t cols, const std::vector<double>& y,
                            const ForestConfig& cfg, Rng& rng, std::vector<size_t>& idx, size_t lo,
                            size_t hi, size_t depth, Tree& tree) {
    const size_t n = hi - lo;
    double sum = 0.0, sum2 = 0.0;
    for (size_t i = lo; i < hi; ++i) {
        sum += y[idx[i]];
        sum2 += y[idx[i]] * y[idx[i]];
    }
    const double node_mean = sum / double(n);
    const double node_sse = sum2 - sum * sum / double(n);

    auto make_leaf = [&]() {
        Node leaf;
        leaf.value = node_mean;
        tree.push_back(leaf);
        return int(tree.size() - 1);
    };

    if (n < 2 * cfg.min_leaf || depth >= cfg.max_depth || node_sse <= 1e-12) return make_leaf();

    const size_t mtry = cfg.mtry != 0 ? std::min(cfg.mtry, cols)
                                      : std::max<size_t>(1, cols / 3);
    std::vector<size_t> feats(cols);
    std::iota(feats.begin(), feats.end(), 0);
    for (size_t i = 0; i < mtry; ++i) {
        const size_t j = i + size_t(rng.uniform_u64(uint64_t(cols - i)));
        std::swap(feats[i], feats[j]);
    }

    int best_feat = -1;
    double best_thr = 0.0, best_sse = node_sse;
    std::vector<size_t> sorted(idx.begin() + long(lo), idx.begin() + long(hi));
    std::vector<size_t> best_sorted;

    for (size_t f = 0; f < mtry; ++f) {
        const size_t feat = feats[f];
        std::sort(sorted.begin(), sorted.end(), [&](size_t a, size_t b) {
            const double va = X[a * cols + feat], vb = X[b * cols + feat];
            return va != vb ? va < vb : a < b;
        });
        double left_sum = 0.0, left_sum2 = 0.0;
        for (size_t i = 0; i + 1 < n; ++i) {
            const double yi = y[sorted[i]];
            left_sum += yi;
            left_sum2 += yi * yi;
            const size_t nl = i + 1, nr = n - nl;
            if (nl < cfg.min_leaf || nr < cfg.min_leaf) continue;
            const double vl = X[sorted[i] * cols + feat];
            const double vr = X[sorted[i + 1] * cols + feat];
            if (vl == vr) continue;
            const double right_sum = sum - left_sum, right_sum2 = sum2 - left_sum2;
            const double sse = (left_sum2 - left_sum * left_sum / double(nl)) +
                               (right_sum2 - right_sum * right_sum / double(nr));
            if (sse < best_sse - 1e-12) {
                best_sse = sse;
                best_feat = int(feat);
                best_thr = 0.5 * (vl + vr);
                best_sorted = sorted;
            }
        }
    }

    if (best_feat < 0) return make_leaf();

    std::copy(best_sorted.begin(), best_sorted.end(), idx.begin() + long(lo));
    size_t mid = lo;
    while (mid < hi && X[idx[mid] * cols + size_t(best_feat)] <= best_thr) ++mid;

    Node split;
    split.feature = best_feat;
    split.threshold = best_thr;
    tree.push_back(split);
    const int self = int(tree.size() - 1);
    const int l = build_node(X, cols, y, cfg, rng, idx, lo, mid, depth + 1, tree);
    const int r = build_node(X, cols, y, cfg, rng, idx, mid, hi, depth + 1, tree);
    tree[size_t(self)].left = l;
    tree[size_t(self)].right = r;
    return self;
}

void ForestModel::fit(const std::vector<double>& X, size_t rows, size_t cols,
                      const std::vector<double>& y, uint64_t seed) {
    if (rows == 0 || cols == 0) throw ShapeError("cannot fit forest on empty matrix");
    if (X.size() != rows * cols) throw ShapeError("matrix size does not match rows*cols");
    if (y.size() != rows) throw ShapeError("target length does not match rows");
    if (cfg_.n_trees == 0 || cfg_.min_leaf == 0) throw ConfigError("bad forest parameters");

    trees_.clear();
    trees_.reserve(cfg_.n_trees);
    for (size_t t = 0; t < cfg_.n_trees; ++t) {
        Rng rng(Rng::derive(seed, t));
        std::vector<size_t> idx(rows);
        if (cfg_.bootstrap) {
            for (auto& i : idx) i = size_t(rng.uniform_u64(uint64_t(rows)));
        } else {
            std::iota(idx.begin(), idx.end(), 0);
        }
        Tree tree;
        build_node(X, cols, y, cfg_, rng, idx, 0, rows, 0, tree);
        trees_.push_back(std::move(tree));
    }
}

double ForestModel::predict_tree(size_t tree, std::span<const double> x) const {
    const Tree& t = trees_.at(tree);
    size_t node = 0;
    while (t[node].feature >= 0) {
        const size_t next =
            x[size_t(t[node].feature)] <= t[node].threshold ? size_t(t[node].left)
                                                            : size_t(t[node].right);
        node = next;
    }
    return t[node].value;
}

double ForestModel::predict_one(std::span<const double> x) const {
    if (trees_.empty()) throw ShapeError("forest model not fitted");
    double acc = 0.0;
    for (size_t t = 0; t < trees_.size(); ++t) acc += predict_tree(t, x);
    return acc / double(trees_.size());
}

nlohmann::json ForestModel::to_json() const {
    nlohmann::json j;
    j["type"] = "forest";
    j["n_trees"] = cfg_.n_trees;
    j["max_depth"] = cfg_.max_depth;
    j["min_leaf"] = cfg_.min_leaf;
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : trees_) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& n : tree)
            nodes.push_back({{"f", n.feature},
                             {"t", n.threshold},
                             {"v", n.value},
                             {"l", n.left},
                             {"r", n.right}});
        trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
    return j;
}

std::unique_ptr<ForestModel> ForestModel::from_json(const nlohmann::json& j) {
    ForestConfig cfg;
    cfg.n_trees = j.at("n_trees").get<size_t>();
    cfg.max_depth = j.at("max_depth").get<size_t>();
    cfg.min_leaf = j.at("min_leaf").get<size_t>();
    auto model = std::make_unique<ForestModel>(cfg);
    for (const auto& tj : j.at("trees")) {
        Tree tree;
        for (const auto& nj : tj) {
            Node n;
            n.feature = nj.at("f").get<int>();
            n.threshold = nj.at("t").get<double>();
            n.value = nj.at("v").get<double>();
            n.left = nj.at("l").get<int>();
            n.right = nj.at("r").get<int>();
            tree.push_back(n);
        }
        model->trees_.push_back(std::move(tree));
    }
    return model;
}

} // namespace phq
