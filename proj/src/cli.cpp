#include <cmath>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "phq/csv.hpp"
#include "phq/dataio.hpp"
#include "phq/errors.hpp"
#include "phq/pipeline.hpp"
#include "phq/synth.hpp"

namespace phq {

namespace {

namespace fs = std::filesystem;

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return j;
}

void print_family_summary(const nlohmann::json& report) {
    for (const auto& f : report.at("families_order")) {
        const auto& o = report.at("families").at(f.get<std::string>()).at("overall");
        std::cout << "  " << f.get<std::string>() << ": rmse=" << o.at("rmse").get<double>()
                  << " mae=" << o.at("mae").get<double>() << " ccc=" << o.at("ccc").get<double>()
                  << "\n";
    }
}

// Per-sample out-of-fold predictions and the fitted per-fold preprocessing
// state, flattened out of the report JSON into plain files.
void write_run_artifacts(const fs::path& out_dir, const nlohmann::json& report) {
    const auto& ids = report.at("sample_ids");
    const auto& y = report.at("y");
    const auto& meta = report.at("meta");
    const auto& names = report.at("feature_names");

    for (const auto& fam : report.at("families_order")) {
        const std::string family = fam.get<std::string>();
        const auto& section = report.at("families").at(family);

        CsvTable preds;
        preds.header = {"sample_id", "truth", "prediction", "abs_error",
                        "duration_s", "gender", "task"};
        const auto& p = section.at("predictions");
        for (size_t r = 0; r < ids.size(); ++r) {
            const double truth = y.at(r).get<double>();
            const double pred = p.at(r).get<double>();
            preds.rows.push_back({ids.at(r).get<std::string>(), format_double(truth),
                                  format_double(pred), format_double(std::abs(truth - pred)),
                                  format_double(meta.at("duration_s").at(r).get<double>()),
                                  meta.at("gender").at(r).get<std::string>(),
                                  meta.at("task").at(r).get<std::string>()});
        }
        write_csv(out_dir / ("predictions_" + family + ".csv"), preds);

        const fs::path fold_dir = out_dir / "folds" / family;
        const auto& selection = section.at("selection").at("per_fold");
        const auto& mu = section.at("standardizer").at("per_fold_mean");
        const auto& sigma = section.at("standardizer").at("per_fold_sigma");
        for (size_t k = 0; k < selection.size(); ++k) {
            std::string listing;
            for (const auto& name : selection.at(k))
                listing += name.get<std::string>() + "\n";
            atomic_write_text(fold_dir / ("fold" + std::to_string(k + 1) + "_selection.txt"),
                              listing);

            CsvTable table;
            table.header = {"feature", "mu", "sigma"};
            for (size_t c = 0; c < names.size(); ++c)
                table.rows.push_back({names.at(c).get<std::string>(),
                                      format_double(mu.at(k).at(c).get<double>()),
                                      format_double(sigma.at(k).at(c).get<double>())});
            write_csv(fold_dir / ("fold" + std::to_string(k + 1) + "_standardizer.csv"), table);
        }
    }
}

} // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"speech-based PHQ-8 severity estimation pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    uint64_t seed = 42;
    size_t jobs = 1;
    std::string out_dir = "out";
    app.add_option("--config", config_path, "pipeline config JSON");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--jobs", jobs, "worker threads for feature extraction");
    app.add_option("--out", out_dir, "output directory");

    // Signal-chain knobs, overriding whatever the config file says.
    double target_dbfs = 0.0, overlap = 0.0, ddir_alpha = 0.0, gain_floor = 0.0;
    double enh_frame_ms = 0.0;
    int noise_frames = 0;
    bool no_enhance = false;
    auto* opt_dbfs = app.add_option("--target-dbfs", target_dbfs, "loudness target (dBFS)");
    auto* opt_frame = app.add_option("--enhance-frame-ms", enh_frame_ms, "enhancer frame length");
    auto* opt_overlap =
        app.add_option("--enhance-overlap", overlap, "enhancer frame overlap fraction");
    auto* opt_noise =
        app.add_option("--enhance-noise-frames", noise_frames, "leading noise-only frames");
    auto* opt_alpha =
        app.add_option("--enhance-alpha", ddir_alpha, "decision-directed smoothing alpha");
    auto* opt_floor = app.add_option("--enhance-gain-floor", gain_floor, "spectral gain floor");
    app.add_flag("--no-enhance", no_enhance, "skip log-MMSE enhancement");

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
    size_t synth_subjects = 0, synth_tasks = 0, deep_dims = 0;
    double coupling = -1.0;
    bool emit_deep = false;
    synth_cmd->add_option("--subjects", synth_subjects, "override subject count");
    synth_cmd->add_option("--tasks", synth_tasks, "override tasks per subject");
    synth_cmd->add_option("--coupling", coupling, "PHQ-8 to voice coupling in [0,1]");
    synth_cmd->add_flag("--deep", emit_deep, "also write deep feature matrices");
    synth_cmd->add_option("--deep-dims", deep_dims, "deep representation width");

    auto* extract_cmd = app.add_subcommand("extract", "extract conventional features");
    auto* enhance_cmd = app.add_subcommand("enhance", "write enhanced WAVs");
    auto* select_cmd = app.add_subcommand("select", "whole-dataset feature selection listing");
    auto* run_cmd = app.add_subcommand("run", "cross-validated evaluation and report");
    auto* bench_cmd = app.add_subcommand("benchmark", "conventional vs deep comparison");

    auto* report_cmd = app.add_subcommand("report", "re-render markdown from a report JSON");
    std::string report_json_path, report_timings_path;
    report_cmd->add_option("--json", report_json_path, "report JSON path")->required();
    report_cmd->add_option("--timings", report_timings_path, "timings JSON path");

    for (CLI::App* sub : {synth_cmd, extract_cmd, enhance_cmd, select_cmd, run_cmd, bench_cmd,
                          report_cmd})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        PipelineConfig cfg =
            config_path.empty() ? PipelineConfig{} : PipelineConfig::load(config_path);
        if (opt_dbfs->count()) cfg.target_dbfs = target_dbfs;
        if (opt_frame->count()) cfg.enhancement.frame_ms = enh_frame_ms;
        if (opt_overlap->count()) cfg.enhancement.overlap_fraction = overlap;
        if (opt_noise->count()) cfg.enhancement.noise_frames = noise_frames;
        if (opt_alpha->count()) cfg.enhancement.ddir_alpha = ddir_alpha;
        if (opt_floor->count()) cfg.enhancement.gain_floor = gain_floor;
        if (no_enhance) cfg.enhance = false;
        cfg.validate();

        if (synth_cmd->parsed()) {
            if (synth_subjects > 0) cfg.synth.n_subjects = synth_subjects;
            if (synth_tasks > 0) cfg.synth.tasks_per_subject = synth_tasks;
            if (coupling >= 0.0) cfg.synth.coupling = coupling;
            if (emit_deep) cfg.synth.emit_deep = true;
            if (deep_dims > 0) cfg.synth.deep_dims = deep_dims;
            const auto metas = synth_corpus(out_dir, cfg.synth, seed);
            std::cout << "wrote " << metas.size() << " samples under " << out_dir << "\n";
        } else if (extract_cmd->parsed()) {
            const ExtractOutcome outcome = run_extract(cfg, jobs);
            std::cout << "extracted " << outcome.extracted << ", reused " << outcome.reused
                      << ", failed " << outcome.failures.size() << "\n";
            for (const auto& f : outcome.failures) std::cerr << "  failed " << f << "\n";
            if (outcome.partial()) return 4;
        } else if (enhance_cmd->parsed()) {
            const fs::path dir = fs::path(out_dir) / "enhanced";
            const EnhanceOutcome outcome = run_enhance(cfg, dir);
            std::cout << "enhanced " << outcome.processed << " clips into " << dir.string()
                      << " (gain range [" << outcome.min_gain << ", " << outcome.max_gain
                      << "])\n";
        } else if (select_cmd->parsed()) {
            const nlohmann::json sel = run_select(cfg);
            atomic_write_text(fs::path(out_dir) / "selection.json", dump(sel));
            for (const auto& item : sel.at("selected"))
                std::cout << "  " << item.at("rank").get<size_t>() << ". "
                          << item.at("feature").get<std::string>() << "\n";
        } else if (run_cmd->parsed()) {
            const RunArtifacts artifacts = run_pipeline(cfg, seed);
            atomic_write_text(fs::path(out_dir) / "report.json", dump(artifacts.report));
            atomic_write_text(fs::path(out_dir) / "report.md", render_run_markdown(artifacts.report));
            atomic_write_text(fs::path(out_dir) / "timings.json", dump(artifacts.timings));
            write_run_artifacts(out_dir, artifacts.report);
            std::cout << "run complete; report under " << out_dir << "\n";
            print_family_summary(artifacts.report);
        } else if (bench_cmd->parsed()) {
            const RunArtifacts artifacts = run_benchmark(cfg, seed);
            atomic_write_text(fs::path(out_dir) / "benchmark.json", dump(artifacts.report));
            atomic_write_text(fs::path(out_dir) / "benchmark.md",
                       render_benchmark_markdown(artifacts.report, artifacts.timings));
            atomic_write_text(fs::path(out_dir) / "timings.json", dump(artifacts.timings));
            std::cout << "benchmark complete; report under " << out_dir << "\n";
        } else if (report_cmd->parsed()) {
            const nlohmann::json report = read_json(report_json_path);
            const std::string schema =
                report.contains("schema") ? report.at("schema").get<std::string>() : "";
            if (schema == "phqspeech-run-v1") {
                std::cout << render_run_markdown(report);
            } else if (schema == "phqspeech-benchmark-v1") {
                nlohmann::json timings = nlohmann::json::object();
                if (!report_timings_path.empty()) timings = read_json(report_timings_path);
                std::cout << render_benchmark_markdown(report, timings);
            } else {
                throw ConfigError("unrecognized report schema: " + schema);
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

} // namespace phq
