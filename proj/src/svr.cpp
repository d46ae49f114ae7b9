#include <algorithm>
#include <cmath>
#include <limits>

#include "phq/errors.hpp"
#include "phq/models.hpp"

namespace phq {

std::vector<double> Regressor::predict(const std::vector<double>& X, size_t rows) const {
    if (rows == 0) return {};
    const size_t cols = X.size() / rows;
    if (X.size() != rows * cols) throw ShapeError("prediction matrix is not rectangular");
    std::vector<double> out(rows);
    for (size_t r = 0; r < rows; ++r)
        out[r] = predict_one(std::span<const double>(X.data() + r * cols, cols));
    return out;
}

namespace {

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
    double d2 = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

} // namespace

void SvrModel::fit(const std::vector<double>& X, size_t rows, size_t cols,
                   const std::vector<double>& y, uint64_t) {
    if (rows == 0 || cols == 0) throw ShapeError("cannot fit SVR on empty matrix");
    if (X.size() != rows * cols) throw ShapeError("matrix size does not match rows*cols");
    if (y.size() != rows) throw ShapeError("target length does not match rows");
    if (cfg_.c <= 0 || cfg_.gamma <= 0 || cfg_.epsilon < 0) throw ConfigError("bad SVR parameters");
    for (double v : X)
        if (!std::isfinite(v)) throw DataError("non-finite value in SVR design matrix");
    for (double v : y)
        if (!std::isfinite(v)) throw DataError("non-finite value in SVR target");

    const size_t n = rows;
    support_x_ = X;
    cols_ = cols;

    std::vector<double> kernel(n * n);
    for (size_t i = 0; i < n; ++i) {
        auto xi = std::span<const double>(X.data() + i * cols, cols);
        for (size_t j = i; j < n; ++j) {
            const double k = rbf(xi, std::span<const double>(X.data() + j * cols, cols), cfg_.gamma);
            kernel[i * n + j] = k;
            kernel[j * n + i] = k;
        }
    }

    // Dual over u = [alpha; alpha*]: min 1/2 u^T Q u + p^T u subject to
    // sum(s_i u_i) = 0 and 0 <= u <= C, with s = +1 on the first block and
    // -1 on the second. Q_ij = s_i s_j K(i mod n, j mod n).
    const size_t m = 2 * n;
    auto sign = [n](size_t i) { return i < n ? 1.0 : -1.0; };
    auto kval = [&](size_t i, size_t j) { return kernel[(i % n) * n + (j % n)]; };

    std::vector<double> u(m, 0.0);
    std::vector<double> grad(m);
    for (size_t i = 0; i < m; ++i) grad[i] = cfg_.epsilon - sign(i) * y[i % n];

    const double C = cfg_.c;
    const double tau = 1e-12;
    converged_ = false;
    iterations_ = 0;
    kkt_gap_ = std::numeric_limits<double>::infinity();

    for (size_t iter = 0; iter < cfg_.max_iter; ++iter) {
        // Maximal violating pair on -s * grad.
        double up_max = -std::numeric_limits<double>::infinity();
        double down_min = std::numeric_limits<double>::infinity();
        size_t i_sel = m, j_sel = m;
        for (size_t t = 0; t < m; ++t) {
            const double s = sign(t);
            const double v = -s * grad[t];
            const bool in_up = (s > 0 && u[t] < C) || (s < 0 && u[t] > 0);
            const bool in_down = (s > 0 && u[t] > 0) || (s < 0 && u[t] < C);
            if (in_up && v > up_max) {
                up_max = v;
                i_sel = t;
            }
            if (in_down && v < down_min) {
                down_min = v;
                j_sel = t;
            }
        }
        kkt_gap_ = up_max - down_min;
        if (i_sel == m || j_sel == m || kkt_gap_ < cfg_.tol) {
            converged_ = true;
            iterations_ = iter;
            break;
        }

        const size_t i = i_sel, j = j_sel;
        const double si = sign(i), sj = sign(j);
        const double qii = kval(i, i), qjj = kval(j, j), qij = si * sj * kval(i, j);
        const double old_i = u[i], old_j = u[j];

        if (si != sj) {
            const double quad = std::max(qii + qjj + 2.0 * si * sj * kval(i, j), tau);
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = u[i] - u[j];
            u[i] += delta;
            u[j] += delta;
            if (diff > 0 && u[j] < 0) {
                u[j] = 0;
                u[i] = diff;
            } else if (diff <= 0 && u[i] < 0) {
                u[i] = 0;
                u[j] = -diff;
            }
            if (diff > 0 && u[i] > C) {
                u[i] = C;
                u[j] = C - diff;
            } else if (diff <= 0 && u[j] > C) {
                u[j] = C;
                u[i] = C + diff;
            }
        } else {
            const double quad = std::max(qii + qjj - 2.0 * qij, tau);
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = u[i] + u[j];
            u[i] -= delta;
            u[j] += delta;
            if (sum > C && u[i] > C) {
                u[i] = C;
                u[j] = sum - C;
            } else if (sum <= C && u[j] < 0) {
                u[j] = 0;
                u[i] = sum;
            }
            if (sum > C && u[j] > C) {
                u[j] = C;
                u[i] = sum - C;
            } else if (sum <= C && u[i] < 0) {
                u[i] = 0;
                u[j] = sum;
            }
        }

        const double di = u[i] - old_i, dj = u[j] - old_j;
        if (di == 0.0 && dj == 0.0) {
            iterations_ = iter; // numerically stuck below tol resolution
            break;
        }
        for (size_t t = 0; t < m; ++t) {
            const double st = sign(t);
            grad[t] += st * si * kval(t, i) * di + st * sj * kval(t, j) * dj;
        }
        iterations_ = iter + 1;
    }

    // Bias from the final violating-pair bounds: both free alphas and free
    // alpha-stars pin -s*grad to b, so the midpoint splits the residual gap.
    {
        double up_max = -std::numeric_limits<double>::infinity();
        double down_min = std::numeric_limits<double>::infinity();
        for (size_t t = 0; t < m; ++t) {
            const double s = sign(t);
            const double v = -s * grad[t];
            if (((s > 0 && u[t] < C) || (s < 0 && u[t] > 0)) && v > up_max) up_max = v;
            if (((s > 0 && u[t] > 0) || (s < 0 && u[t] < C)) && v < down_min) down_min = v;
        }
        if (std::isfinite(up_max) && std::isfinite(down_min))
            bias_ = 0.5 * (up_max + down_min);
        else if (std::isfinite(up_max))
            bias_ = up_max;
        else
            bias_ = std::isfinite(down_min) ? down_min : 0.0;
    }

    beta_.assign(n, 0.0);
    for (size_t k = 0; k < n; ++k) beta_[k] = u[k] - u[n + k];
}

double SvrModel::predict_one(std::span<const double> x) const {
    if (cols_ == 0) throw ShapeError("SVR model not fitted");
    if (x.size() != cols_) throw ShapeError("feature width differs from training width");
    double acc = bias_;
    const size_t n = beta_.size();
    for (size_t k = 0; k < n; ++k) {
        if (beta_[k] == 0.0) continue;
        acc += beta_[k] * rbf(std::span<const double>(support_x_.data() + k * cols_, cols_), x,
                              cfg_.gamma);
    }
    return acc;
}

nlohmann::json SvrModel::to_json() const {
    nlohmann::json j;
    j["type"] = "svr";
    j["c"] = cfg_.c;
    j["gamma"] = cfg_.gamma;
    j["epsilon"] = cfg_.epsilon;
    j["bias"] = bias_;
    j["cols"] = cols_;
    nlohmann::json sv = nlohmann::json::array();
    nlohmann::json bv = nlohmann::json::array();
    for (size_t k = 0; k < beta_.size(); ++k) {
        if (beta_[k] == 0.0) continue;
        bv.push_back(beta_[k]);
        nlohmann::json row = nlohmann::json::array();
        for (size_t c = 0; c < cols_; ++c) row.push_back(support_x_[k * cols_ + c]);
        sv.push_back(std::move(row));
    }
    j["beta"] = std::move(bv);
    j["support"] = std::move(sv);
    return j;
}

std::unique_ptr<SvrModel> SvrModel::from_json(const nlohmann::json& j) {
    SvrConfig cfg;
    cfg.c = j.at("c").get<double>();
    cfg.gamma = j.at("gamma").get<double>();
    cfg.epsilon = j.at("epsilon").get<double>();
    auto model = std::make_unique<SvrModel>(cfg);
    model->cols_ = j.at("cols").get<size_t>();
    model->bias_ = j.at("bias").get<double>();
    model->beta_ = j.at("beta").get<std::vector<double>>();
    model->support_x_.clear();
    for (const auto& row : j.at("support"))
        for (const auto& v : row) model->support_x_.push_back(v.get<double>());
    if (model->support_x_.size() != model->beta_.size() * model->cols_)
        throw FormatError("SVR support vectors do not match beta length");
    return model;
}

} // namespace phq
