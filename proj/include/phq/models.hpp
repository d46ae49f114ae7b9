#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace phq {

class Rng;

// Row-major design matrix; every model trains deterministically from an
// explicit seed so repeated runs are reproducible.
class Regressor {
  public:
    virtual ~Regressor() = default;
    virtual void fit(const std::vector<double>& X, size_t rows, size_t cols,
                     const std::vector<double>& y, uint64_t seed) = 0;
    virtual double predict_one(std::span<const double> x) const = 0;
    virtual nlohmann::json to_json() const = 0;
    virtual std::string family() const = 0;

    std::vector<double> predict(const std::vector<double>& X, size_t rows) const;
};

struct SvrConfig {
    double c = 1.0;
    double gamma = 0.01; // RBF kernel width
    double epsilon = 0.1;
    double tol = 1e-3;
    size_t max_iter = 1000000;
};

// Epsilon-SVR trained by SMO on the 2n-variable dual with a maximal
// violating pair working set.
class SvrModel : public Regressor {
  public:
    explicit SvrModel(SvrConfig cfg = {}) : cfg_(cfg) {}

    void fit(const std::vector<double>& X, size_t rows, size_t cols,
             const std::vector<double>& y, uint64_t seed) override;
    double predict_one(std::span<const double> x) const override;
    nlohmann::json to_json() const override;
    std::string family() const override { return "svr"; }
    static std::unique_ptr<SvrModel> from_json(const nlohmann::json& j);

    const SvrConfig& config() const { return cfg_; }
    const std::vector<double>& betas() const { return beta_; }
    double bias() const { return bias_; }
    double kkt_gap() const { return kkt_gap_; }
    bool converged() const { return converged_; }
    size_t iterations() const { return iterations_; }

  private:
    SvrConfig cfg_;
    std::vector<double> support_x_; // row-major, one row per training point
    size_t cols_ = 0;
    std::vector<double> beta_; // alpha - alpha*, aligned with support_x_ rows
    double bias_ = 0.0;
    double kkt_gap_ = 0.0;
    bool converged_ = false;
    size_t iterations_ = 0;
};

// Depth counts split levels: max_depth 0 is a root-only stump.
inline constexpr size_t kNoDepthLimit = std::numeric_limits<size_t>::max();

struct ForestConfig {
    size_t n_trees = 100;
    size_t max_depth = 16;
    size_t min_leaf = 5;
    size_t mtry = 0; // 0 = max(1, cols / 3)
    bool bootstrap = true;
};

class ForestModel : public Regressor {
  public:
    explicit ForestModel(ForestConfig cfg = {}) : cfg_(cfg) {}

    void fit(const std::vector<double>& X, size_t rows, size_t cols,
             const std::vector<double>& y, uint64_t seed) override;
    double predict_one(std::span<const double> x) const override;
    nlohmann::json to_json() const override;
    std::string family() const override { return "forest"; }
    static std::unique_ptr<ForestModel> from_json(const nlohmann::json& j);

    const ForestConfig& config() const { return cfg_; }
    size_t tree_count() const { return trees_.size(); }
    double predict_tree(size_t tree, std::span<const double> x) const;

  private:
    struct Node {
        int feature = -1; // -1 marks a leaf
        double threshold = 0.0;
        double value = 0.0;
        int left = -1;
        int right = -1;
    };
    using Tree = std::vector<Node>;

    static int build_node(const std::vector<double>& X, size_t cols, const std::vector<double>& y,
                          const ForestConfig& cfg, Rng& rng, std::vector<size_t>& idx, size_t lo,
                          size_t hi, size_t depth, Tree& tree);

    ForestConfig cfg_;
    std::vector<Tree> trees_;
};

struct FnnConfig {
    std::vector<size_t> hidden = {500, 250, 125, 125};
    double dropout = 0.3;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    size_t batch_size = 32;
    size_t epochs = 150;
};

// Fully connected net with ReLU hidden layers, linear output, inverted
// dropout, MSE loss, Adam. Internals use Eigen matrices.
class FnnModel : public Regressor {
  public:
    struct Impl; // Eigen-backed weights, kept out of the header

    explicit FnnModel(FnnConfig cfg = {}) : cfg_(cfg) {}

    void fit(const std::vector<double>& X, size_t rows, size_t cols,
             const std::vector<double>& y, uint64_t seed) override;
    double predict_one(std::span<const double> x) const override;
    nlohmann::json to_json() const override;
    std::string family() const override { return "fnn"; }
    static std::unique_ptr<FnnModel> from_json(const nlohmann::json& j);

    const FnnConfig& config() const { return cfg_; }

    // Deterministic-init + flat-parameter access so gradients can be checked
    // against finite differences. loss_and_gradients runs without dropout.
    void initialize(size_t cols, uint64_t seed);
    size_t parameter_count() const;
    static size_t parameter_count(size_t cols, const FnnConfig& cfg);
    std::vector<double> parameters() const;
    void set_parameters(const std::vector<double>& flat);
    double loss_and_gradients(const std::vector<double>& X, size_t rows,
                              const std::vector<double>& y, std::vector<double>& grad) const;

    const std::vector<double>& epoch_losses() const { return epoch_losses_; }

  private:
    std::shared_ptr<Impl> impl_;
    FnnConfig cfg_;
    std::vector<double> epoch_losses_;
};

std::unique_ptr<Regressor> regressor_from_json(const nlohmann::json& j);

} // namespace phq
