#include "phq/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <thread>

#include "phq/audio.hpp"
#include "phq/dataio.hpp"
#include "phq/deep.hpp"
#include "phq/enhance.hpp"
#include "phq/errors.hpp"
#include "phq/evaluation.hpp"
#include "phq/features.hpp"
#include "phq/rng.hpp"
#include "phq/timing.hpp"

namespace phq {

namespace {

namespace fs = std::filesystem;

struct Dataset {
    std::vector<SampleMeta> meta;
    std::vector<double> X; // rows x cols, aligned with meta
    size_t cols = 0;
    std::vector<double> y;
    std::vector<std::string> names;
};

// Features are joined to metadata by sample_id; every metadata row must have
// a feature row or the run cannot produce one prediction per sample.
Dataset assemble_dataset(const std::vector<SampleMeta>& meta, const FeatureMatrix& features) {
    std::map<std::string, size_t> row_of;
    for (size_t r = 0; r < features.rows(); ++r) row_of[features.sample_ids[r]] = r;

    Dataset ds;
    ds.meta = meta;
    ds.names = features.names;
    ds.cols = features.cols();
    ds.X.reserve(meta.size() * ds.cols);
    ds.y.reserve(meta.size());
    std::vector<std::string> missing;
    for (const auto& m : meta) {
        auto it = row_of.find(m.sample_id);
        if (it == row_of.end()) {
            missing.push_back(m.sample_id);
            continue;
        }
        const auto row = features.row(it->second);
        ds.X.insert(ds.X.end(), row.begin(), row.end());
        ds.y.push_back(double(m.phq8));
    }
    if (!missing.empty()) {
        std::string msg = "missing feature rows for " + std::to_string(missing.size()) +
                          " samples (first: " + missing.front() + ")";
        throw DataError(msg);
    }
    return ds;
}

uintmax_t file_bytes(const fs::path& p) {
    std::error_code ec;
    const auto sz = fs::file_size(p, ec);
    return ec ? 0 : sz;
}

// Per-sample deep matrices aggregated to fixed-width mean+std rows.
Dataset load_deep_dataset(const std::vector<SampleMeta>& metas, const fs::path& dir,
                          uintmax_t* bytes_out) {
    Dataset deep;
    deep.meta = metas;
    uintmax_t bytes = 0;
    for (const auto& m : metas) {
        const fs::path p = dir / (m.sample_id + ".csv");
        const DeepFeatureMatrix mat = ingest_deep_features(p);
        const auto agg = aggregate_deep(mat);
        if (deep.cols == 0) {
            deep.cols = agg.size();
            deep.names = deep_feature_names(mat.dims);
        } else if (agg.size() != deep.cols) {
            throw ShapeError("deep matrix width differs for sample " + m.sample_id);
        }
        deep.X.insert(deep.X.end(), agg.begin(), agg.end());
        deep.y.push_back(double(m.phq8));
        bytes += file_bytes(p);
    }
    if (bytes_out) *bytes_out = bytes;
    return deep;
}

std::vector<SampleMeta> filter_tasks(std::vector<SampleMeta> metas,
                                     const std::vector<std::string>& keep) {
    if (keep.empty()) return metas;
    std::set<Task> wanted;
    for (const auto& name : keep) wanted.insert(task_from_string(name));
    std::vector<SampleMeta> out;
    for (auto& m : metas)
        if (wanted.count(m.task)) out.push_back(std::move(m));
    if (out.empty()) throw DataError("task_filter removed every sample");
    return out;
}

std::vector<size_t> rows_where(const std::vector<SampleMeta>& meta,
                               const std::function<bool(const SampleMeta&)>& pred) {
    std::vector<size_t> out;
    for (size_t r = 0; r < meta.size(); ++r)
        if (pred(meta[r])) out.push_back(r);
    return out;
}

Dataset subset(const Dataset& ds, const std::vector<size_t>& rows) {
    Dataset out;
    out.cols = ds.cols;
    out.names = ds.names;
    for (size_t r : rows) {
        out.meta.push_back(ds.meta[r]);
        out.y.push_back(ds.y[r]);
        out.X.insert(out.X.end(), ds.X.begin() + long(r * ds.cols),
                     ds.X.begin() + long((r + 1) * ds.cols));
    }
    return out;
}

size_t count_subjects(const std::vector<SampleMeta>& meta) {
    std::set<std::string> s;
    for (const auto& m : meta) s.insert(m.subject_id);
    return s.size();
}

nlohmann::json metric_json(double rmse_v, double mae_v, size_t n) {
    return {{"rmse", rmse_v}, {"mae", mae_v}, {"n", n}};
}

nlohmann::json cv_metrics_json(const CvResult& cv, size_t n) {
    nlohmann::json j = metric_json(cv.rmse, cv.mae, n);
    j["ccc"] = cv.ccc_value;
    nlohmann::json fr = nlohmann::json::array(), fm = nlohmann::json::array();
    for (const auto& f : cv.folds) {
        fr.push_back(f.rmse);
        fm.push_back(f.mae);
    }
    j["fold_rmse"] = std::move(fr);
    j["fold_mae"] = std::move(fm);
    return j;
}

double population_std(const std::vector<double>& v) {
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / double(v.size()));
}

// One family's full section of the run report: overall CV, gender rows,
// per-task rows, selection and grid summaries.
nlohmann::json family_report(const Dataset& ds, const PipelineConfig& cfg,
                             const std::string& family, uint64_t seed, CvResult& overall_out,
                             StageTimes& times) {
    const FamilyGrid grid = cfg.grid_for(family);
    const CvOptions opt = cfg.cv_options(seed);

    CvResult overall = evaluate_cv(ds.X, ds.meta.size(), ds.cols, ds.y, ds.meta, grid, opt);
    times.preprocess += overall.times.preprocess;
    times.train += overall.times.train;
    times.predict += overall.times.predict;

    nlohmann::json fam;
    fam["overall"] = cv_metrics_json(overall, ds.meta.size());

    // Gender rows: either independent CV runs per gender or slices of the
    // overall held-out predictions.
    nlohmann::json gender;
    for (const Gender g : {Gender::Female, Gender::Male}) {
        const auto rows = rows_where(ds.meta, [g](const SampleMeta& m) { return m.gender == g; });
        if (rows.empty()) continue;
        if (cfg.gender_mode == "separate") {
            const Dataset sub = subset(ds, rows);
            if (count_subjects(sub.meta) < opt.n_folds) {
                gender[to_string(g)] = {{"skipped", "fewer subjects than folds"}};
                continue;
            }
            CvResult cv = evaluate_cv(sub.X, sub.meta.size(), sub.cols, sub.y, sub.meta, grid, opt);
            times.preprocess += cv.times.preprocess;
            times.train += cv.times.train;
            times.predict += cv.times.predict;
            gender[to_string(g)] = cv_metrics_json(cv, rows.size());
        } else {
            const MetricRow row = metrics_for_rows(ds.y, overall.predictions, rows);
            gender[to_string(g)] = metric_json(row.rmse, row.mae, row.n);
        }
    }
    fam["gender"] = std::move(gender);
    fam["gender_mode"] = cfg.gender_mode;

    // Task rows: independent CV per task subset.
    nlohmann::json tasks;
    for (const Task t : all_tasks()) {
        const auto rows = rows_where(ds.meta, [t](const SampleMeta& m) { return m.task == t; });
        if (rows.empty()) continue;
        const Dataset sub = subset(ds, rows);
        if (count_subjects(sub.meta) < opt.n_folds) {
            tasks[to_string(t)] = {{"skipped", "fewer subjects than folds"}};
            continue;
        }
        CvResult cv = evaluate_cv(sub.X, sub.meta.size(), sub.cols, sub.y, sub.meta, grid, opt);
        times.preprocess += cv.times.preprocess;
        times.train += cv.times.train;
        times.predict += cv.times.predict;
        tasks[to_string(t)] = cv_metrics_json(cv, rows.size());
    }
    fam["tasks"] = std::move(tasks);

    // Error correlates against clip duration and true severity.
    const auto errs = abs_errors(ds.y, overall.predictions);
    std::vector<double> durations;
    durations.reserve(ds.meta.size());
    for (const auto& m : ds.meta) durations.push_back(m.duration_s);
    fam["error_correlates"] = {{"ccc_abs_err_duration", ccc(errs, durations)},
                               {"ccc_abs_err_phq8", ccc(errs, ds.y)}};

    // Selection and grid choices per fold.
    nlohmann::json selection = nlohmann::json::array();
    nlohmann::json grid_choice = nlohmann::json::array();
    nlohmann::json grid_table = nlohmann::json::array();
    for (const auto& f : overall.folds) {
        nlohmann::json names = nlohmann::json::array();
        for (size_t c : f.selected) names.push_back(ds.names[c]);
        selection.push_back(std::move(names));
        grid_choice.push_back(grid.describe(f.grid_index));
        if (!f.search.mean_rmse.empty()) {
            nlohmann::json t;
            t["mean_rmse"] = f.search.mean_rmse;
            t["fold_rmse"] = f.search.fold_rmse;
            grid_table.push_back(std::move(t));
        }
    }
    fam["selection"] = {{"per_fold", std::move(selection)},
                        {"count", overall.folds.empty() ? size_t(0) : overall.folds[0].selected.size()}};
    fam["grid"] = {{"chosen_per_fold", std::move(grid_choice)},
                   {"points", grid.size()},
                   {"inner_tables", std::move(grid_table)}};
    fam["predictions"] = overall.predictions;

    nlohmann::json std_mean = nlohmann::json::array(), std_sigma = nlohmann::json::array();
    for (const auto& f : overall.folds) {
        std_mean.push_back(f.standardizer_mean);
        std_sigma.push_back(f.standardizer_sigma);
    }
    fam["standardizer"] = {{"per_fold_mean", std::move(std_mean)},
                           {"per_fold_sigma", std::move(std_sigma)}};

    overall_out = std::move(overall);
    return fam;
}

nlohmann::json stage_times_json(const StageTimes& t) {
    return {{"data_loading_s", t.load},
            {"preprocessing_s", t.preprocess},
            {"training_s", t.train},
            {"prediction_s", t.predict},
            {"total_s", t.total()}};
}

double median3(double a, double b, double c) {
    return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

} // namespace

ExtractOutcome run_extract(const PipelineConfig& cfg, size_t jobs) {
    const auto metas = load_metadata(cfg.metadata_csv);
    const FeatureManifest manifest = FeatureManifest::load(cfg.manifest_path);

    // Resume: keep rows whose ids are still in the metadata, as long as the
    // column set matches the manifest.
    std::map<std::string, std::vector<double>> done;
    FlagMap flags;
    const fs::path out_path(cfg.features_csv);
    const fs::path flags_path(cfg.features_csv + ".flags.csv");
    if (fs::exists(out_path)) {
        const FeatureMatrix existing = load_feature_matrix(out_path);
        if (existing.names != manifest.entries)
            throw ConfigError("existing feature CSV does not match manifest " + manifest.version);
        for (size_t r = 0; r < existing.rows(); ++r) {
            const auto row = existing.row(r);
            done[existing.sample_ids[r]] = std::vector<double>(row.begin(), row.end());
        }
        if (fs::exists(flags_path)) flags = load_flags(flags_path);
    }

    ExtractOutcome outcome;
    std::vector<size_t> todo;
    for (size_t i = 0; i < metas.size(); ++i) {
        if (done.count(metas[i].sample_id))
            ++outcome.reused;
        else
            todo.push_back(i);
    }

    struct WorkResult {
        std::vector<double> values;
        std::vector<std::string> flags;
        std::string error;
    };
    std::vector<WorkResult> results(todo.size());

    auto process = [&](size_t k) {
        const SampleMeta& meta = metas[todo[k]];
        WorkResult& res = results[k];
        try {
            AudioClip clip = load_wav(fs::path(cfg.audio_dir) / (meta.sample_id + ".wav"));
            bool clipped = false;
            clip = normalize_dbfs(clip, cfg.target_dbfs, &clipped);
            if (clipped) res.flags.push_back("clipped_after_normalization");
            if (cfg.enhance) clip = logmmse_enhance(clip, cfg.enhancement);
            FeatureVector fv = extract_conventional(clip, manifest, cfg.features);
            res.values = std::move(fv.values);
            res.flags.insert(res.flags.end(), fv.flags.begin(), fv.flags.end());
        } catch (const Error& e) {
            res.error = e.what();
        }
    };

    if (jobs <= 1) {
        for (size_t k = 0; k < todo.size(); ++k) process(k);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        const size_t n_threads = std::min(jobs, std::max<size_t>(todo.size(), 1));
        pool.reserve(n_threads);
        for (size_t t = 0; t < n_threads; ++t)
            pool.emplace_back([&]() {
                for (size_t k = next.fetch_add(1); k < todo.size(); k = next.fetch_add(1))
                    process(k);
            });
        for (auto& t : pool) t.join();
    }

    for (size_t k = 0; k < todo.size(); ++k) {
        const SampleMeta& meta = metas[todo[k]];
        if (!results[k].error.empty()) {
            outcome.failures.push_back(meta.sample_id + ": " + results[k].error);
            continue;
        }
        done[meta.sample_id] = std::move(results[k].values);
        if (!results[k].flags.empty()) flags[meta.sample_id] = std::move(results[k].flags);
        ++outcome.extracted;
    }

    FeatureMatrix out;
    out.names = manifest.entries;
    for (const auto& meta : metas) {
        auto it = done.find(meta.sample_id);
        if (it == done.end()) continue; // failed sample, reported via outcome
        out.sample_ids.push_back(meta.sample_id);
        out.values.insert(out.values.end(), it->second.begin(), it->second.end());
    }
    if (out.rows() == 0) throw DataError("no sample could be extracted");
    fs::create_directories(out_path.parent_path().empty() ? "." : out_path.parent_path());
    save_feature_matrix(out_path, out);
    save_flags(flags_path, flags);
    return outcome;
}

EnhanceOutcome run_enhance(const PipelineConfig& cfg, const fs::path& out_dir) {
    const auto metas = load_metadata(cfg.metadata_csv);
    fs::create_directories(out_dir);

    EnhanceOutcome outcome;
    for (const auto& meta : metas) {
        AudioClip clip = load_wav(fs::path(cfg.audio_dir) / (meta.sample_id + ".wav"));
        clip = normalize_dbfs(clip, cfg.target_dbfs);
        GainStats stats;
        const AudioClip enhanced = logmmse_enhance(clip, cfg.enhancement, &stats);
        write_wav(out_dir / (meta.sample_id + ".wav"), enhanced);
        outcome.min_gain = std::min(outcome.min_gain, stats.min_gain);
        outcome.max_gain = std::max(outcome.max_gain, stats.max_gain);
        ++outcome.processed;
    }
    return outcome;
}

nlohmann::json run_select(const PipelineConfig& cfg) {
    const auto metas = load_metadata(cfg.metadata_csv);
    const FeatureMatrix features = load_feature_matrix(cfg.features_csv);
    Dataset ds = assemble_dataset(metas, features);

    Standardizer std_all;
    const auto std_X = std_all.fit_transform(ds.X, ds.meta.size(), ds.cols);
    const size_t k = selection_count(ds.cols, cfg.select_fraction);
    const MrmrResult sel = mrmr_select(std_X, ds.meta.size(), ds.cols, ds.y, k);

    nlohmann::json j;
    j["note"] = "whole-dataset listing; cross-validated runs refit selection per fold";
    j["count"] = k;
    nlohmann::json items = nlohmann::json::array();
    for (size_t i = 0; i < sel.selected.size(); ++i) {
        items.push_back({{"rank", i + 1},
                         {"feature", ds.names[sel.selected[i]]},
                         {"relevance", sel.relevance[sel.selected[i]]},
                         {"score", sel.score_at_pick[i]}});
    }
    j["selected"] = std::move(items);
    return j;
}

RunArtifacts run_pipeline(const PipelineConfig& cfg, uint64_t seed) {
    Stopwatch load_watch;
    const auto metas = filter_tasks(load_metadata(cfg.metadata_csv), cfg.task_filter);
    Dataset ds;
    std::string manifest_version;
    if (cfg.feature_source == "deep") {
        ds = load_deep_dataset(metas, cfg.deep_dir, nullptr);
    } else {
        const FeatureManifest manifest = FeatureManifest::load(cfg.manifest_path);
        const FeatureMatrix features = load_feature_matrix(cfg.features_csv);
        if (features.names != manifest.entries)
            throw ConfigError("feature CSV columns do not match manifest " + manifest.version);
        ds = assemble_dataset(metas, features);
        manifest_version = manifest.version;
    }
    StageTimes times;
    times.load = load_watch.seconds();

    nlohmann::json report;
    report["schema"] = "phqspeech-run-v1";
    report["config_hash"] = cfg.hash();
    report["seed"] = seed;
    report["feature_source"] = cfg.feature_source;
    report["manifest_version"] =
        manifest_version.empty() ? nlohmann::json() : nlohmann::json(manifest_version);
    report["task_filter"] = cfg.task_filter;
    report["n_samples"] = ds.meta.size();
    report["n_subjects"] = count_subjects(ds.meta);
    report["n_features"] = ds.cols;
    report["label_std"] = population_std(ds.y);
    report["families_order"] = cfg.families;
    report["feature_names"] = ds.names;
    std::vector<std::string> ids;
    nlohmann::json durations = nlohmann::json::array(), genders = nlohmann::json::array(),
                   task_names = nlohmann::json::array();
    ids.reserve(ds.meta.size());
    for (const auto& m : ds.meta) {
        ids.push_back(m.sample_id);
        durations.push_back(m.duration_s);
        genders.push_back(to_string(m.gender));
        task_names.push_back(to_string(m.task));
    }
    report["sample_ids"] = std::move(ids);
    report["y"] = ds.y;
    report["meta"] = {{"duration_s", std::move(durations)},
                      {"gender", std::move(genders)},
                      {"task", std::move(task_names)}};

    nlohmann::json families;
    std::map<std::string, CvResult> overall_runs;
    for (const auto& family : cfg.families) {
        CvResult overall;
        families[family] = family_report(ds, cfg, family, seed, overall, times);
        overall_runs[family] = std::move(overall);
    }
    report["families"] = std::move(families);

    // Optional raw-vs-enhanced comparison on absolute errors.
    if (!cfg.raw_features_csv.empty() && !cfg.enhanced_features_csv.empty()) {
        const Dataset raw = assemble_dataset(metas, load_feature_matrix(cfg.raw_features_csv));
        const Dataset enh = assemble_dataset(metas, load_feature_matrix(cfg.enhanced_features_csv));
        nlohmann::json sig;
        for (const auto& family : cfg.families) {
            const FamilyGrid grid = cfg.grid_for(family);
            const CvOptions opt = cfg.cv_options(seed);
            const CvResult cv_raw =
                evaluate_cv(raw.X, raw.meta.size(), raw.cols, raw.y, raw.meta, grid, opt);
            const CvResult cv_enh =
                evaluate_cv(enh.X, enh.meta.size(), enh.cols, enh.y, enh.meta, grid, opt);
            const SignificanceReport rep = compare_abs_errors(
                raw.y, cv_raw.predictions, cv_enh.predictions, cfg.families.size());
            sig[family] = {{"w", rep.wilcoxon.w},
                           {"p", rep.wilcoxon.p},
                           {"bonferroni_p", rep.bonferroni_p},
                           {"n_effective", rep.wilcoxon.n_effective},
                           {"exact", rep.wilcoxon.exact},
                           {"mean_abs_err_raw", rep.mean_abs_err_a},
                           {"mean_abs_err_enhanced", rep.mean_abs_err_b},
                           {"rmse_raw", cv_raw.rmse},
                           {"rmse_enhanced", cv_enh.rmse}};
        }
        report["enhancement_significance"] = std::move(sig);
    }

    RunArtifacts artifacts;
    artifacts.report = std::move(report);
    artifacts.timings = {{"stages", stage_times_json(times)},
                         {"peak_rss_mb", peak_rss_mb()},
                         {"track", cfg.feature_source}};
    return artifacts;
}

RunArtifacts run_benchmark(const PipelineConfig& cfg, uint64_t seed) {
    const auto metas = filter_tasks(load_metadata(cfg.metadata_csv), cfg.task_filter);

    const bool have_conv = fs::exists(cfg.features_csv);
    const bool have_deep = !cfg.deep_dir.empty() && fs::exists(cfg.deep_dir);
    if (!have_conv && !have_deep)
        throw ConfigError("benchmark needs an extracted feature CSV or a deep_dir");

    const CvOptions opt = cfg.cv_options(seed);

    std::string manifest_version;
    auto load_conv = [&]() {
        const FeatureManifest manifest = FeatureManifest::load(cfg.manifest_path);
        const FeatureMatrix features = load_feature_matrix(cfg.features_csv);
        if (features.names != manifest.entries)
            throw ConfigError("feature CSV columns do not match manifest " + manifest.version);
        manifest_version = manifest.version;
        return assemble_dataset(metas, features);
    };
    auto load_deep = [&]() { return load_deep_dataset(metas, cfg.deep_dir, nullptr); };

    struct TrackOutcome {
        Dataset ds;
        uintmax_t bytes = 0;
        StageTimes stages;       // per-stage medians of the timed runs
        double overhead_s = 0.0; // wall time the stage clocks did not attribute
        std::map<std::string, CvResult> runs;
    };

    // One warm-up run keeps the accuracy results and fills caches; the three
    // timed repeats reload the data each pass so the loading stage is real.
    auto time_track = [&](const std::function<Dataset()>& load, TrackOutcome& out) {
        auto one = [&](StageTimes& times, bool keep) {
            Stopwatch wall;
            Stopwatch load_watch;
            Dataset ds = load();
            times.load = load_watch.seconds();
            for (const auto& family : cfg.families) {
                const FamilyGrid grid = cfg.grid_for(family);
                CvResult cv = evaluate_cv(ds.X, ds.meta.size(), ds.cols, ds.y, ds.meta, grid, opt);
                times.preprocess += cv.times.preprocess;
                times.train += cv.times.train;
                times.predict += cv.times.predict;
                if (keep) out.runs[family] = std::move(cv);
            }
            if (keep) out.ds = std::move(ds);
            return wall.seconds();
        };
        StageTimes discard;
        one(discard, true);
        StageTimes timed[3];
        double spare[3];
        for (int r = 0; r < 3; ++r) {
            const double wall = one(timed[r], false);
            spare[r] = std::max(0.0, wall - timed[r].total());
        }
        out.stages.load = median3(timed[0].load, timed[1].load, timed[2].load);
        out.stages.preprocess = median3(timed[0].preprocess, timed[1].preprocess, timed[2].preprocess);
        out.stages.train = median3(timed[0].train, timed[1].train, timed[2].train);
        out.stages.predict = median3(timed[0].predict, timed[1].predict, timed[2].predict);
        out.overhead_s = median3(spare[0], spare[1], spare[2]);
    };

    std::vector<std::string> track_names;
    std::map<std::string, TrackOutcome> tracks;
    if (have_conv) {
        track_names.push_back("conventional");
        time_track(load_conv, tracks["conventional"]);
        tracks["conventional"].bytes = file_bytes(cfg.features_csv);
    }
    if (have_deep) {
        track_names.push_back("deep");
        time_track(load_deep, tracks["deep"]);
        load_deep_dataset(metas, cfg.deep_dir, &tracks["deep"].bytes);
    }

    nlohmann::json report;
    report["schema"] = "phqspeech-benchmark-v1";
    report["config_hash"] = cfg.hash();
    report["seed"] = seed;
    report["manifest_version"] =
        manifest_version.empty() ? nlohmann::json() : nlohmann::json(manifest_version);
    report["n_samples"] = metas.size();
    report["families_order"] = cfg.families;
    report["tracks_order"] = track_names;
    report["label_std"] = population_std(tracks[track_names[0]].ds.y);
    if (track_names.size() == 1)
        report["warning"] =
            "only the " + track_names[0] + " feature source is present; comparison skipped";

    nlohmann::json tracks_json;
    for (const auto& name : track_names) {
        TrackOutcome& track = tracks[name];
        nlohmann::json t;
        t["n_features"] = track.ds.cols;
        t["selected"] = selection_count(track.ds.cols, cfg.select_fraction);
        nlohmann::json fams;
        for (const auto& family : cfg.families)
            fams[family] = cv_metrics_json(track.runs[family], track.ds.meta.size());
        t["families"] = std::move(fams);
        tracks_json[name] = std::move(t);
    }
    report["tracks"] = std::move(tracks_json);

    // Pooled two-sample t-test on absolute errors, conventional vs deep.
    if (have_conv && have_deep) {
        nlohmann::json sig;
        for (const auto& family : cfg.families) {
            const TrackOutcome& conv = tracks["conventional"];
            const TrackOutcome& deep = tracks["deep"];
            const auto err_conv = abs_errors(conv.ds.y, conv.runs.at(family).predictions);
            const auto err_deep = abs_errors(deep.ds.y, deep.runs.at(family).predictions);
            const TTestResult t = t_test_independent(err_conv, err_deep);
            sig[family] = {{"t", t.t},
                           {"df", t.df},
                           {"p", t.p},
                           {"bonferroni_p", bonferroni(t.p, cfg.families.size())},
                           {"mean_abs_err_conventional", mean_of(err_conv)},
                           {"mean_abs_err_deep", mean_of(err_deep)}};
        }
        report["significance"] = std::move(sig);
    }

    nlohmann::json bytes;
    for (const auto& name : track_names) bytes[name] = tracks[name].bytes;
    if (have_conv && have_deep && tracks["conventional"].bytes > 0)
        bytes["ratio"] =
            double(tracks["deep"].bytes) / double(tracks["conventional"].bytes);
    report["bytes"] = std::move(bytes);

    nlohmann::json timed_tracks;
    for (const auto& name : track_names) {
        nlohmann::json t = stage_times_json(tracks[name].stages);
        t["overhead_s"] = tracks[name].overhead_s;
        timed_tracks[name] = std::move(t);
    }
    RunArtifacts artifacts;
    artifacts.report = std::move(report);
    artifacts.timings = {{"tracks", std::move(timed_tracks)},
                         {"peak_rss_mb", peak_rss_mb()},
                         {"methodology", "median of 3 timed runs after 1 discarded warm-up"}};
    return artifacts;
}

} // namespace phq
