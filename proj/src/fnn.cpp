#include <Eigen/Dense>
#include <cmath>

#include "phq/errors.hpp"
#include "phq/models.hpp"
#include "phq/rng.hpp"

namespace phq {

struct FnnModel::Impl {
    std::vector<size_t> dims; // input, hidden..., 1
    std::vector<Eigen::MatrixXd> W;
    std::vector<Eigen::VectorXd> b;
};

namespace {

// Loss and flat gradient for one batch held as columns of A0. Masks are the
// inverted-dropout scalings (empty = evaluation mode). Flattening order is
// W row-major then b, layer by layer, matching parameters().
double batch_backward(const FnnModel::Impl& net, const Eigen::MatrixXd& A0,
                      const Eigen::RowVectorXd& y, const std::vector<Eigen::MatrixXd>& masks,
                      std::vector<double>& grad_out) {
    const size_t L = net.W.size();
    const auto B = A0.cols();

    std::vector<Eigen::MatrixXd> A(L + 1), Z(L);
    A[0] = A0;
    for (size_t l = 0; l < L; ++l) {
        Z[l] = net.W[l] * A[l];
        Z[l].colwise() += net.b[l];
        if (l + 1 < L) {
            A[l + 1] = Z[l].cwiseMax(0.0);
            if (!masks.empty()) A[l + 1] = A[l + 1].cwiseProduct(masks[l]);
        } else {
            A[l + 1] = Z[l];
        }
    }

    const Eigen::RowVectorXd err = A[L].row(0) - y;
    const double loss = err.squaredNorm() / double(B);

    std::vector<Eigen::MatrixXd> dW(L);
    std::vector<Eigen::VectorXd> db(L);
    Eigen::MatrixXd dZ = (2.0 / double(B)) * err;
    for (size_t l = L; l-- > 0;) {
        dW[l] = dZ * A[l].transpose();
        db[l] = dZ.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd dA = net.W[l].transpose() * dZ;
            if (!masks.empty()) dA = dA.cwiseProduct(masks[l - 1]);
            dZ = dA.cwiseProduct((Z[l - 1].array() > 0.0).cast<double>().matrix());
        }
    }

    size_t total = 0;
    for (size_t l = 0; l < L; ++l) total += net.W[l].size() + net.b[l].size();
    grad_out.resize(total);
    size_t pos = 0;
    for (size_t l = 0; l < L; ++l) {
        for (Eigen::Index i = 0; i < dW[l].rows(); ++i)
            for (Eigen::Index j = 0; j < dW[l].cols(); ++j) grad_out[pos++] = dW[l](i, j);
        for (Eigen::Index i = 0; i < db[l].size(); ++i) grad_out[pos++] = db[l](i);
    }
    return loss;
}

Eigen::MatrixXd columns_from_rows(const std::vector<double>& X, size_t cols,
                                  const std::vector<size_t>& rows_idx) {
    Eigen::MatrixXd A0(Eigen::Index(cols), Eigen::Index(rows_idx.size()));
    for (size_t c = 0; c < rows_idx.size(); ++c)
        for (size_t r = 0; r < cols; ++r) A0(Eigen::Index(r), Eigen::Index(c)) = X[rows_idx[c] * cols + r];
    return A0;
}

} // namespace

size_t FnnModel::parameter_count(size_t cols, const FnnConfig& cfg) {
    size_t total = 0, in = cols;
    for (size_t h : cfg.hidden) {
        total += in * h + h;
        in = h;
    }
    total += in + 1; // linear output unit
    return total;
}

size_t FnnModel::parameter_count() const {
    if (!impl_) throw ShapeError("FNN model not initialized");
    return parameter_count(impl_->dims.front(), cfg_);
}

void FnnModel::initialize(size_t cols, uint64_t seed) {
    if (cols == 0) throw ShapeError("FNN needs at least one input feature");
    for (size_t h : cfg_.hidden)
        if (h == 0) throw ConfigError("hidden layer width cannot be 0");

    impl_ = std::make_shared<Impl>();
    impl_->dims.push_back(cols);
    for (size_t h : cfg_.hidden) impl_->dims.push_back(h);
    impl_->dims.push_back(1);

    Rng rng(Rng::derive(seed, 0));
    const size_t L = impl_->dims.size() - 1;
    impl_->W.resize(L);
    impl_->b.resize(L);
    for (size_t l = 0; l < L; ++l) {
        const auto rows = Eigen::Index(impl_->dims[l + 1]);
        const auto cols_l = Eigen::Index(impl_->dims[l]);
        const double sd = std::sqrt(2.0 / double(impl_->dims[l])); // He init
        impl_->W[l].resize(rows, cols_l);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols_l; ++j) impl_->W[l](i, j) = rng.normal(0.0, sd);
        impl_->b[l] = Eigen::VectorXd::Zero(rows);
    }
}

std::vector<double> FnnModel::parameters() const {
    if (!impl_) throw ShapeError("FNN model not initialized");
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (size_t l = 0; l < impl_->W.size(); ++l) {
        const auto& W = impl_->W[l];
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j) flat.push_back(W(i, j));
        for (Eigen::Index i = 0; i < impl_->b[l].size(); ++i) flat.push_back(impl_->b[l](i));
    }
    return flat;
}

void FnnModel::set_parameters(const std::vector<double>& flat) {
    if (!impl_) throw ShapeError("FNN model not initialized");
    if (flat.size() != parameter_count()) throw ShapeError("parameter vector has wrong length");
    size_t pos = 0;
    for (size_t l = 0; l < impl_->W.size(); ++l) {
        auto& W = impl_->W[l];
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = flat[pos++];
        for (Eigen::Index i = 0; i < impl_->b[l].size(); ++i) impl_->b[l](i) = flat[pos++];
    }
}

double FnnModel::loss_and_gradients(const std::vector<double>& X, size_t rows,
                                    const std::vector<double>& y,
                                    std::vector<double>& grad) const {
    if (!impl_) throw ShapeError("FNN model not initialized");
    if (rows == 0 || y.size() != rows) throw ShapeError("bad batch shape");
    const size_t cols = impl_->dims.front();
    if (X.size() != rows * cols) throw ShapeError("matrix size does not match rows*cols");

    std::vector<size_t> all(rows);
    for (size_t i = 0; i < rows; ++i) all[i] = i;
    const Eigen::MatrixXd A0 = columns_from_rows(X, cols, all);
    Eigen::RowVectorXd yv(static_cast<Eigen::Index>(rows));
    for (size_t i = 0; i < rows; ++i) yv(Eigen::Index(i)) = y[i];
    return batch_backward(*impl_, A0, yv, {}, grad);
}

void FnnModel::fit(const std::vector<double>& X, size_t rows, size_t cols,
                   const std::vector<double>& y, uint64_t seed) {
    if (rows == 0 || cols == 0) throw ShapeError("cannot fit FNN on empty matrix");
    if (X.size() != rows * cols) throw ShapeError("matrix size does not match rows*cols");
    if (y.size() != rows) throw ShapeError("target length does not match rows");
    if (cfg_.dropout < 0.0 || cfg_.dropout >= 1.0) throw ConfigError("dropout outside [0, 1)");
    if (cfg_.batch_size == 0 || cfg_.epochs == 0) throw ConfigError("bad FNN training parameters");

    initialize(cols, seed);
    epoch_losses_.clear();

    std::vector<double> theta = parameters();
    std::vector<double> m(theta.size(), 0.0), v(theta.size(), 0.0), grad;
    double beta1_t = 1.0, beta2_t = 1.0;
    Rng drop_rng(Rng::derive(seed, 1));
    const double keep = 1.0 - cfg_.dropout;

    for (size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
        std::vector<size_t> order(rows);
        for (size_t i = 0; i < rows; ++i) order[i] = i;
        Rng shuffle_rng(Rng::derive(seed, 1000 + epoch));
        shuffle_rng.shuffle(order);

        double epoch_sq = 0.0;
        for (size_t start = 0; start < rows; start += cfg_.batch_size) {
            const size_t stop = std::min(rows, start + cfg_.batch_size);
            const std::vector<size_t> batch(order.begin() + long(start), order.begin() + long(stop));
            const Eigen::MatrixXd A0 = columns_from_rows(X, cols, batch);
            Eigen::RowVectorXd yb(Eigen::Index(batch.size()));
            for (size_t i = 0; i < batch.size(); ++i) yb(Eigen::Index(i)) = y[batch[i]];

            std::vector<Eigen::MatrixXd> masks;
            if (cfg_.dropout > 0.0) {
                masks.resize(cfg_.hidden.size());
                for (size_t l = 0; l < cfg_.hidden.size(); ++l) {
                    masks[l].resize(Eigen::Index(cfg_.hidden[l]), Eigen::Index(batch.size()));
                    for (Eigen::Index i = 0; i < masks[l].rows(); ++i)
                        for (Eigen::Index j = 0; j < masks[l].cols(); ++j)
                            masks[l](i, j) = drop_rng.uniform() < keep ? 1.0 / keep : 0.0;
                }
            }

            const double loss = batch_backward(*impl_, A0, yb, masks, grad);
            if (!std::isfinite(loss))
                throw TrainingError("FNN training diverged (non-finite loss)", int(epoch));
            epoch_sq += loss * double(batch.size());

            beta1_t *= cfg_.adam_beta1;
            beta2_t *= cfg_.adam_beta2;
            for (size_t i = 0; i < theta.size(); ++i) {
                m[i] = cfg_.adam_beta1 * m[i] + (1.0 - cfg_.adam_beta1) * grad[i];
                v[i] = cfg_.adam_beta2 * v[i] + (1.0 - cfg_.adam_beta2) * grad[i] * grad[i];
                const double mhat = m[i] / (1.0 - beta1_t);
                const double vhat = v[i] / (1.0 - beta2_t);
                theta[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.adam_eps);
            }
            set_parameters(theta);
        }
        epoch_losses_.push_back(epoch_sq / double(rows));
    }
}

double FnnModel::predict_one(std::span<const double> x) const {
    if (!impl_) throw ShapeError("FNN model not fitted");
    if (x.size() != impl_->dims.front()) throw ShapeError("feature width differs from training width");

    Eigen::VectorXd a(Eigen::Index(x.size()));
    for (size_t i = 0; i < x.size(); ++i) a(Eigen::Index(i)) = x[i];
    const size_t L = impl_->W.size();
    for (size_t l = 0; l < L; ++l) {
        Eigen::VectorXd z = impl_->W[l] * a + impl_->b[l];
        a = l + 1 < L ? z.cwiseMax(0.0).eval() : z;
    }
    return a(0);
}

nlohmann::json FnnModel::to_json() const {
    if (!impl_) throw ShapeError("FNN model not fitted");
    nlohmann::json j;
    j["type"] = "fnn";
    j["dims"] = impl_->dims;
    j["dropout"] = cfg_.dropout;
    nlohmann::json weights = nlohmann::json::array();
    nlohmann::json biases = nlohmann::json::array();
    for (size_t l = 0; l < impl_->W.size(); ++l) {
        nlohmann::json w = nlohmann::json::array();
        const auto& W = impl_->W[l];
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index jj = 0; jj < W.cols(); ++jj) w.push_back(W(i, jj));
        weights.push_back(std::move(w));
        nlohmann::json b = nlohmann::json::array();
        for (Eigen::Index i = 0; i < impl_->b[l].size(); ++i) b.push_back(impl_->b[l](i));
        biases.push_back(std::move(b));
    }
    j["weights"] = std::move(weights);
    j["biases"] = std::move(biases);
    return j;
}

std::unique_ptr<FnnModel> FnnModel::from_json(const nlohmann::json& j) {
    const auto dims = j.at("dims").get<std::vector<size_t>>();
    if (dims.size() < 2) throw FormatError("FNN dims must have input and output");

    FnnConfig cfg;
    cfg.hidden.assign(dims.begin() + 1, dims.end() - 1);
    cfg.dropout = j.at("dropout").get<double>();
    auto model = std::make_unique<FnnModel>(cfg);
    model->impl_ = std::make_shared<Impl>();
    model->impl_->dims = dims;

    const auto& weights = j.at("weights");
    const auto& biases = j.at("biases");
    if (weights.size() != dims.size() - 1 || biases.size() != dims.size() - 1)
        throw FormatError("FNN layer count mismatch");
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        const auto rows = Eigen::Index(dims[l + 1]), cols = Eigen::Index(dims[l]);
        const auto w = weights[l].get<std::vector<double>>();
        if (w.size() != size_t(rows * cols)) throw FormatError("FNN weight block has wrong size");
        Eigen::MatrixXd W(rows, cols);
        size_t pos = 0;
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index jj = 0; jj < cols; ++jj) W(i, jj) = w[pos++];
        const auto b = biases[l].get<std::vector<double>>();
        if (b.size() != size_t(rows)) throw FormatError("FNN bias block has wrong size");
        Eigen::VectorXd bv(rows);
        for (Eigen::Index i = 0; i < rows; ++i) bv(i) = b[size_t(i)];
        model->impl_->W.push_back(std::move(W));
        model->impl_->b.push_back(std::move(bv));
    }
    return model;
}

std::unique_ptr<Regressor> regressor_from_json(const nlohmann::json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "svr") return SvrModel::from_json(j);
    if (type == "forest") return ForestModel::from_json(j);
    if (type == "fnn") return FnnModel::from_json(j);
    throw FormatError("unknown model type: " + type);
}

} // namespace phq
