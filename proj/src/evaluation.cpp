#include "phq/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "phq/errors.hpp"
#include "phq/rng.hpp"

namespace phq {

size_t FamilyGrid::size() const {
    if (family == "svr") return svr.size();
    if (family == "forest") return forest.size();
    if (family == "fnn") return fnn.size();
    throw ConfigError("unknown model family: " + family);
}

std::unique_ptr<Regressor> FamilyGrid::make(size_t index) const {
    if (index >= size()) throw ConfigError("grid index out of range");
    if (family == "svr") return std::make_unique<SvrModel>(svr[index]);
    if (family == "forest") return std::make_unique<ForestModel>(forest[index]);
    return std::make_unique<FnnModel>(fnn[index]);
}

std::string FamilyGrid::describe(size_t index) const {
    std::ostringstream out;
    if (family == "svr") {
        out << "C=" << svr[index].c << " gamma=" << svr[index].gamma;
    } else if (family == "forest") {
        out << "trees=" << forest[index].n_trees << " depth=";
        if (forest[index].max_depth == kNoDepthLimit)
            out << "unlimited";
        else
            out << forest[index].max_depth;
    } else {
        out << "epochs=" << fnn[index].epochs << " lr=" << fnn[index].learning_rate;
    }
    return out.str();
}

std::vector<double> take_columns(const std::vector<double>& X, size_t rows, size_t cols,
                                 const std::vector<size_t>& selected) {
    if (X.size() != rows * cols) throw ShapeError("matrix size does not match rows*cols");
    std::vector<double> out(rows * selected.size());
    for (size_t r = 0; r < rows; ++r)
        for (size_t k = 0; k < selected.size(); ++k) {
            if (selected[k] >= cols) throw ShapeError("selected column out of range");
            out[r * selected.size() + k] = X[r * cols + selected[k]];
        }
    return out;
}

namespace {

// Subset of rows from a row-major matrix.
std::vector<double> take_rows(const std::vector<double>& X, size_t cols,
                              const std::vector<size_t>& rows_idx) {
    std::vector<double> out(rows_idx.size() * cols);
    for (size_t i = 0; i < rows_idx.size(); ++i)
        std::copy_n(X.data() + rows_idx[i] * cols, cols, out.data() + i * cols);
    return out;
}

std::vector<double> take_values(const std::vector<double>& v, const std::vector<size_t>& idx) {
    std::vector<double> out(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
    return out;
}

std::vector<SampleMeta> take_meta(const std::vector<SampleMeta>& meta,
                                  const std::vector<size_t>& idx) {
    std::vector<SampleMeta> out;
    out.reserve(idx.size());
    for (size_t i : idx) out.push_back(meta[i]);
    return out;
}

InnerSearch inner_grid_search(const std::vector<double>& X, size_t rows, size_t cols,
                              const std::vector<double>& y, const std::vector<SampleMeta>& meta,
                              const FamilyGrid& grid, const CvOptions& opt) {
    InnerSearch search;
    const size_t g = grid.size();
    if (g <= 1) return search; // single point: nothing to search

    std::set<std::string> subjects;
    for (const auto& s : meta) subjects.insert(s.subject_id);
    const size_t inner_folds = std::min(opt.inner_folds, subjects.size());
    FoldPlan plan = make_folds(meta, inner_folds, Rng::derive(opt.seed, 7777));

    search.fold_rmse.assign(g, std::vector<double>(plan.n_folds, 0.0));
    search.mean_rmse.assign(g, 0.0);
    for (size_t f = 0; f < plan.n_folds; ++f) {
        std::vector<size_t> tr, te;
        for (size_t r = 0; r < rows; ++r)
            (size_t(plan.sample_fold[r]) == f ? te : tr).push_back(r);
        const auto Xtr = take_rows(X, cols, tr);
        const auto Xte = take_rows(X, cols, te);
        const auto ytr = take_values(y, tr);
        const auto yte = take_values(y, te);
        for (size_t i = 0; i < g; ++i) {
            auto model = grid.make(i);
            model->fit(Xtr, tr.size(), cols, ytr, Rng::derive(opt.seed, 100 + f));
            const auto pred = model->predict(Xte, te.size());
            search.fold_rmse[i][f] = rmse(yte, pred);
        }
    }
    for (size_t i = 0; i < g; ++i) {
        double acc = 0.0;
        for (double v : search.fold_rmse[i]) acc += v;
        search.mean_rmse[i] = acc / double(search.fold_rmse[i].size());
        if (search.mean_rmse[i] < search.mean_rmse[search.best_index]) search.best_index = i;
    }
    return search;
}

} // namespace

FittedFold fit_fold(const std::vector<double>& train_X, size_t cols,
                    const std::vector<double>& train_y,
                    const std::vector<SampleMeta>& train_meta,
                    const std::vector<std::string>& test_subjects, const FamilyGrid& grid,
                    const CvOptions& opt) {
    const size_t rows = train_meta.size();
    if (rows == 0) throw InsufficientDataError("empty training split");
    if (train_X.size() != rows * cols) throw ShapeError("matrix size does not match rows*cols");
    if (train_y.size() != rows) throw ShapeError("target length does not match rows");

    const std::set<std::string> held_out(test_subjects.begin(), test_subjects.end());
    for (const auto& s : train_meta)
        if (held_out.count(s.subject_id))
            throw LeakageError("subject " + s.subject_id + " appears in both train and test");

    FittedFold fold;
    Stopwatch prep_watch;
    auto std_X = fold.standardizer.fit_transform(train_X, rows, cols);
    const size_t k = selection_count(cols, opt.select_fraction);
    fold.selected = mrmr_select(std_X, rows, cols, train_y, k).selected;
    const auto train_sel = take_columns(std_X, rows, cols, fold.selected);
    fold.preprocess_seconds = prep_watch.seconds();

    Stopwatch train_watch;
    fold.search = inner_grid_search(train_sel, rows, fold.selected.size(), train_y, train_meta,
                                    grid, opt);
    fold.model = grid.make(fold.search.best_index);
    fold.model->fit(train_sel, rows, fold.selected.size(), train_y, Rng::derive(opt.seed, 31));
    fold.train_seconds = train_watch.seconds();
    return fold;
}

CvResult evaluate_cv(const std::vector<double>& X, size_t rows, size_t cols,
                     const std::vector<double>& y, const std::vector<SampleMeta>& meta,
                     const FamilyGrid& grid, const CvOptions& opt,
                     const FoldPlan* plan_override) {
    if (meta.size() != rows) throw ShapeError("metadata length does not match rows");
    if (y.size() != rows) throw ShapeError("target length does not match rows");

    const FoldPlan plan =
        plan_override != nullptr ? *plan_override : make_folds(meta, opt.n_folds, opt.seed);

    CvResult res;
    res.predictions.assign(rows, 0.0);
    std::vector<char> predicted(rows, 0);

    for (size_t f = 0; f < plan.n_folds; ++f) {
        std::vector<size_t> tr;
        for (size_t r = 0; r < rows; ++r)
            if (size_t(plan.sample_fold[r]) != f) tr.push_back(r);
        const auto& te = plan.test_rows[f];
        if (tr.empty() || te.empty()) throw FoldError("fold with empty train or test split");

        auto fitted = fit_fold(take_rows(X, cols, tr), cols, take_values(y, tr),
                               take_meta(meta, tr), plan.fold_subjects[f], grid, opt);
        res.times.preprocess += fitted.preprocess_seconds;
        res.times.train += fitted.train_seconds;

        Stopwatch predict_watch;
        const auto test_std = fitted.standardizer.transform(take_rows(X, cols, te), te.size());
        const auto test_sel = take_columns(test_std, te.size(), cols, fitted.selected);
        const auto pred = fitted.model->predict(test_sel, te.size());
        res.times.predict += predict_watch.seconds();

        FoldOutcome out;
        out.test_rows = te;
        out.selected = fitted.selected;
        out.grid_index = fitted.search.best_index;
        out.search = std::move(fitted.search);
        out.standardizer_mean = fitted.standardizer.mean();
        out.standardizer_sigma = fitted.standardizer.sigma();
        std::vector<double> fold_pred(te.size());
        for (size_t i = 0; i < te.size(); ++i) {
            if (predicted[te[i]]) throw FoldError("sample predicted twice");
            predicted[te[i]] = 1;
            double p = pred[i];
            if (opt.clamp_predictions) p = std::clamp(p, 0.0, 24.0);
            fold_pred[i] = p;
            res.predictions[te[i]] = p;
        }
        out.rmse = rmse(take_values(y, te), fold_pred);
        out.mae = mae(take_values(y, te), fold_pred);
        res.folds.push_back(std::move(out));
    }

    for (char p : predicted)
        if (!p) throw FoldError("sample never predicted");

    res.rmse = rmse(y, res.predictions);
    res.mae = mae(y, res.predictions);
    res.ccc_value = ccc(y, res.predictions);
    if (!std::isfinite(res.rmse) || !std::isfinite(res.mae) || !std::isfinite(res.ccc_value))
        throw DataError("non-finite pooled metric");
    return res;
}

MetricRow metrics_for_rows(const std::vector<double>& y, const std::vector<double>& pred,
                           const std::vector<size_t>& rows) {
    MetricRow row;
    row.n = rows.size();
    if (rows.empty()) return row;
    const auto yt = take_values(y, rows);
    const auto yp = take_values(pred, rows);
    row.rmse = rmse(yt, yp);
    row.mae = mae(yt, yp);
    return row;
}

std::vector<double> abs_errors(const std::vector<double>& y, const std::vector<double>& pred) {
    if (y.size() != pred.size()) throw ShapeError("prediction length does not match targets");
    std::vector<double> out(y.size());
    for (size_t i = 0; i < y.size(); ++i) out[i] = std::abs(y[i] - pred[i]);
    return out;
}

SignificanceReport compare_abs_errors(const std::vector<double>& y,
                                      const std::vector<double>& pred_a,
                                      const std::vector<double>& pred_b, size_t m_comparisons) {
    const auto ea = abs_errors(y, pred_a);
    const auto eb = abs_errors(y, pred_b);
    SignificanceReport rep;
    rep.wilcoxon = wilcoxon_signed_rank(ea, eb);
    rep.bonferroni_p = bonferroni(rep.wilcoxon.p, m_comparisons);
    rep.mean_abs_err_a = mean_of(ea);
    rep.mean_abs_err_b = mean_of(eb);
    return rep;
}

} // namespace phq
