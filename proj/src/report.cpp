#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "phq/pipeline.hpp"

namespace phq {

namespace {

std::string fmt(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string display_name(const std::string& family) {
    if (family == "svr") return "SVR";
    if (family == "forest") return "Random forest";
    if (family == "fnn") return "FNN";
    return family;
}

std::vector<std::string> families_of(const nlohmann::json& report) {
    std::vector<std::string> out;
    for (const auto& f : report.at("families_order")) out.push_back(f.get<std::string>());
    return out;
}

// "rmse / mae" cell, or the skip note when a subset run was not possible.
std::string metric_cell(const nlohmann::json& j) {
    if (j.contains("skipped")) return "n/a";
    return fmt(j.at("rmse").get<double>()) + " / " + fmt(j.at("mae").get<double>());
}

std::string n_of(const nlohmann::json& j) {
    if (j.contains("skipped")) return "0";
    return std::to_string(j.at("n").get<size_t>());
}

} // namespace

std::string render_run_markdown(const nlohmann::json& report) {
    const auto families = families_of(report);
    std::ostringstream md;

    md << "# PHQ-8 severity estimation from speech\n\n";
    md << "- samples: " << report.at("n_samples").get<size_t>() << " across "
       << report.at("n_subjects").get<size_t>() << " subjects\n";
    md << "- features: " << report.at("n_features").get<size_t>() << " "
       << (report.contains("feature_source") ? report.at("feature_source").get<std::string>()
                                             : std::string("conventional"))
       << " descriptors\n";
    md << "- label std: " << fmt(report.at("label_std").get<double>()) << "\n";
    md << "- seed: " << report.at("seed").get<uint64_t>() << ", config: `"
       << report.at("config_hash").get<std::string>() << "`\n\n";

    md << "## Overall accuracy\n\n";
    md << "5-fold subject-independent cross-validation; every sample is predicted by the fold\n"
       << "that held its subject out.\n\n";
    md << "| Model | RMSE | MAE | CCC |\n|---|---:|---:|---:|\n";
    for (const auto& f : families) {
        const auto& o = report.at("families").at(f).at("overall");
        md << "| " << display_name(f) << " | " << fmt(o.at("rmse").get<double>()) << " | "
           << fmt(o.at("mae").get<double>()) << " | " << fmt(o.at("ccc").get<double>()) << " |\n";
    }
    md << "\n";

    md << "## Accuracy by gender\n\n";
    const std::string mode =
        report.at("families").at(families.front()).at("gender_mode").get<std::string>();
    if (mode == "separate")
        md << "Models are trained and cross-validated within each gender.\n\n";
    else
        md << "Rows slice the overall held-out predictions by gender.\n\n";
    md << "| Group | n |";
    for (const auto& f : families) md << " " << display_name(f) << " RMSE / MAE |";
    md << "\n|---|---:|";
    for (size_t i = 0; i < families.size(); ++i) md << "---:|";
    md << "\n";
    for (const std::string group : {"female", "male"}) {
        const auto& first = report.at("families").at(families.front()).at("gender");
        if (!first.contains(group)) continue;
        md << "| " << group << " | " << n_of(first.at(group)) << " |";
        for (const auto& f : families)
            md << " " << metric_cell(report.at("families").at(f).at("gender").at(group)) << " |";
        md << "\n";
    }
    md << "\n";

    md << "## Accuracy by speech task\n\n";
    md << "Independent cross-validation per task subset.\n\n";
    md << "| Task | n |";
    for (const auto& f : families) md << " " << display_name(f) << " RMSE / MAE |";
    md << "\n|---|---:|";
    for (size_t i = 0; i < families.size(); ++i) md << "---:|";
    md << "\n";
    const auto& first_tasks = report.at("families").at(families.front()).at("tasks");
    for (auto it = first_tasks.begin(); it != first_tasks.end(); ++it) {
        md << "| " << it.key() << " | " << n_of(it.value()) << " |";
        for (const auto& f : families)
            md << " " << metric_cell(report.at("families").at(f).at("tasks").at(it.key())) << " |";
        md << "\n";
    }
    md << "\n";

    md << "## Error correlates\n\n";
    md << "| Model | CCC(abs err, duration) | CCC(abs err, PHQ-8) |\n|---|---:|---:|\n";
    for (const auto& f : families) {
        const auto& ec = report.at("families").at(f).at("error_correlates");
        md << "| " << display_name(f) << " | " << fmt(ec.at("ccc_abs_err_duration").get<double>())
           << " | " << fmt(ec.at("ccc_abs_err_phq8").get<double>()) << " |\n";
    }
    md << "\n";

    md << "## Feature selection\n\n";
    for (const auto& f : families) {
        const auto& sel = report.at("families").at(f).at("selection");
        md << "- " << display_name(f) << ": " << sel.at("count").get<size_t>()
           << " features per fold; fold 1 picks:";
        const auto& per_fold = sel.at("per_fold");
        if (!per_fold.empty()) {
            bool first = true;
            for (const auto& name : per_fold.at(0)) {
                md << (first ? " " : ", ") << "`" << name.get<std::string>() << "`";
                first = false;
            }
        }
        md << "\n";
    }
    md << "\n";

    md << "## Hyperparameters chosen per fold\n\n";
    md << "| Model |";
    size_t max_folds = 0;
    for (const auto& f : families)
        max_folds = std::max(max_folds,
                             report.at("families").at(f).at("grid").at("chosen_per_fold").size());
    for (size_t k = 0; k < max_folds; ++k) md << " fold " << k + 1 << " |";
    md << "\n|---|";
    for (size_t k = 0; k < max_folds; ++k) md << "---|";
    md << "\n";
    for (const auto& f : families) {
        md << "| " << display_name(f) << " |";
        const auto& chosen = report.at("families").at(f).at("grid").at("chosen_per_fold");
        for (size_t k = 0; k < max_folds; ++k)
            md << " " << (k < chosen.size() ? chosen.at(k).get<std::string>() : "") << " |";
        md << "\n";
    }
    md << "\n";

    if (report.contains("enhancement_significance")) {
        md << "## Enhancement effect on absolute errors\n\n";
        md << "Wilcoxon signed-rank on paired absolute errors, raw vs enhanced features,\n"
           << "Bonferroni-corrected across models.\n\n";
        md << "| Model | mean abs err raw | mean abs err enhanced | W | p | Bonferroni p |\n";
        md << "|---|---:|---:|---:|---:|---:|\n";
        for (const auto& f : families) {
            const auto& s = report.at("enhancement_significance").at(f);
            md << "| " << display_name(f) << " | " << fmt(s.at("mean_abs_err_raw").get<double>())
               << " | " << fmt(s.at("mean_abs_err_enhanced").get<double>()) << " | "
               << fmt(s.at("w").get<double>(), 1) << " | " << fmt(s.at("p").get<double>(), 4)
               << " | " << fmt(s.at("bonferroni_p").get<double>(), 4) << " |\n";
        }
        md << "\n";
    }

    return md.str();
}

std::string render_benchmark_markdown(const nlohmann::json& report,
                                      const nlohmann::json& timings) {
    const auto families = families_of(report);
    std::vector<std::string> tracks;
    for (const auto& t : report.at("tracks_order")) tracks.push_back(t.get<std::string>());
    auto track_label = [](const std::string& t) {
        return t == "conventional" ? std::string("Conventional") : std::string("Deep");
    };
    std::ostringstream md;

    md << "# Conventional vs deep representation benchmark\n\n";
    if (report.contains("warning"))
        md << "> **Warning:** " << report.at("warning").get<std::string>() << "\n\n";
    md << "- samples: " << report.at("n_samples").get<size_t>() << "\n";
    md << "- seed: " << report.at("seed").get<uint64_t>() << ", config: `"
       << report.at("config_hash").get<std::string>() << "`\n";
    for (const auto& t : tracks)
        md << "- " << t << " features: "
           << report.at("tracks").at(t).at("n_features").get<size_t>() << "\n";
    md << "\n";

    md << "## Accuracy\n\n";
    md << "| Model |";
    for (const auto& t : tracks) md << " " << track_label(t) << " RMSE / MAE |";
    md << "\n|---|";
    for (size_t i = 0; i < tracks.size(); ++i) md << "---:|";
    md << "\n";
    for (const auto& f : families) {
        md << "| " << display_name(f) << " |";
        for (const auto& t : tracks)
            md << " " << metric_cell(report.at("tracks").at(t).at("families").at(f)) << " |";
        md << "\n";
    }
    md << "\n";

    if (report.contains("significance")) {
        md << "## Absolute error comparison (pooled two-sample t-test)\n\n";
        md << "| Model | mean abs err conv | mean abs err deep | t | df | p | Bonferroni p |\n";
        md << "|---|---:|---:|---:|---:|---:|---:|\n";
        for (const auto& f : families) {
            const auto& s = report.at("significance").at(f);
            md << "| " << display_name(f) << " | "
               << fmt(s.at("mean_abs_err_conventional").get<double>()) << " | "
               << fmt(s.at("mean_abs_err_deep").get<double>()) << " | "
               << fmt(s.at("t").get<double>()) << " | " << fmt(s.at("df").get<double>(), 1)
               << " | " << fmt(s.at("p").get<double>(), 4) << " | "
               << fmt(s.at("bonferroni_p").get<double>(), 4) << " |\n";
        }
        md << "\n";
    }

    md << "## Processing cost\n\n";
    if (timings.contains("tracks")) {
        if (timings.contains("methodology"))
            md << "Wall-clock per stage, " << timings.at("methodology").get<std::string>()
               << ".\n\n";
        md << "| Stage |";
        for (const auto& t : tracks) md << " " << track_label(t) << " (s) |";
        md << "\n|---|";
        for (size_t i = 0; i < tracks.size(); ++i) md << "---:|";
        md << "\n";
        const std::pair<const char*, const char*> stages[] = {
            {"Data loading", "data_loading_s"},
            {"Preprocessing", "preprocessing_s"},
            {"Training", "training_s"},
            {"Prediction", "prediction_s"},
            {"Total", "total_s"},
        };
        for (const auto& [label, key] : stages) {
            md << "| " << label << " |";
            for (const auto& t : tracks)
                md << " " << fmt(timings.at("tracks").at(t).at(key).get<double>()) << " |";
            md << "\n";
        }
        md << "\n";
        md << "Unattributed overhead (outside the stage clocks):";
        for (size_t i = 0; i < tracks.size(); ++i)
            md << (i ? ", " : " ") << tracks[i] << " "
               << fmt(timings.at("tracks").at(tracks[i]).at("overhead_s").get<double>()) << " s";
        md << "\n\n";
        if (timings.contains("peak_rss_mb"))
            md << "Peak RSS: " << fmt(timings.at("peak_rss_mb").get<double>(), 1) << " MB\n\n";
    } else {
        md << "Timing table unavailable (no timings supplied).\n\n";
    }

    md << "## Storage\n\n";
    const auto& bytes = report.at("bytes");
    md << "| Track | Bytes on disk |\n|---|---:|\n";
    for (const auto& t : tracks)
        md << "| " << track_label(t) << " | " << bytes.at(t).get<uintmax_t>() << " |\n";
    md << "\n";
    if (bytes.contains("ratio"))
        md << "Deep/conventional size ratio: " << fmt(bytes.at("ratio").get<double>(), 1) << "x\n";

    return md.str();
}

} // namespace phq
