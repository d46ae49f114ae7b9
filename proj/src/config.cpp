#include "phq/config.hpp"

#include <algorithm>

#include "phq/csv.hpp"
#include "phq/errors.hpp"

namespace phq {

namespace {

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) {
        try {
            out = it->get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("bad config field '") + key + "': " + e.what());
        }
    }
}

} // namespace

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    PipelineConfig c;
    read_field(j, "metadata_csv", c.metadata_csv);
    read_field(j, "audio_dir", c.audio_dir);
    read_field(j, "deep_dir", c.deep_dir);
    read_field(j, "features_csv", c.features_csv);
    read_field(j, "raw_features_csv", c.raw_features_csv);
    read_field(j, "enhanced_features_csv", c.enhanced_features_csv);
    read_field(j, "target_dbfs", c.target_dbfs);
    read_field(j, "enhance", c.enhance);
    read_field(j, "manifest_path", c.manifest_path);
    read_field(j, "feature_source", c.feature_source);
    read_field(j, "task_filter", c.task_filter);
    read_field(j, "select_fraction", c.select_fraction);
    read_field(j, "n_folds", c.n_folds);
    read_field(j, "inner_folds", c.inner_folds);
    read_field(j, "clamp_predictions", c.clamp_predictions);
    read_field(j, "gender_mode", c.gender_mode);
    read_field(j, "families", c.families);

    if (auto it = j.find("enhancement"); it != j.end()) {
        read_field(*it, "frame_ms", c.enhancement.frame_ms);
        read_field(*it, "overlap_fraction", c.enhancement.overlap_fraction);
        read_field(*it, "noise_frames", c.enhancement.noise_frames);
        read_field(*it, "ddir_alpha", c.enhancement.ddir_alpha);
        read_field(*it, "gain_floor", c.enhancement.gain_floor);
    }
    if (auto it = j.find("features"); it != j.end()) {
        read_field(*it, "frame_ms", c.features.frame_ms);
        read_field(*it, "hop_ms", c.features.hop_ms);
        read_field(*it, "pitch_frame_ms", c.features.pitch_frame_ms);
        read_field(*it, "preemphasis", c.features.preemphasis);
        read_field(*it, "n_mels", c.features.n_mels);
        read_field(*it, "n_mfcc", c.features.n_mfcc);
        read_field(*it, "log_floor", c.features.log_floor);
        read_field(*it, "voicing_threshold", c.features.voicing_threshold);
        read_field(*it, "f0_min_hz", c.features.f0_min_hz);
        read_field(*it, "f0_max_hz", c.features.f0_max_hz);
        read_field(*it, "silence_dbfs", c.features.silence_dbfs);
        read_field(*it, "min_pause_ms", c.features.min_pause_ms);
        read_field(*it, "delta_window", c.features.delta_window);
    }
    if (auto it = j.find("svr"); it != j.end()) {
        read_field(*it, "c_grid", c.svr_c_grid);
        read_field(*it, "gamma_grid", c.svr_gamma_grid);
        read_field(*it, "epsilon", c.svr_epsilon);
    }
    if (auto it = j.find("forest"); it != j.end()) {
        read_field(*it, "trees_grid", c.forest_trees_grid);
        if (auto d = it->find("depth_grid"); d != it->end()) {
            // null entries mean "no depth cap"
            if (!d->is_array()) throw ConfigError("forest depth_grid must be an array");
            c.forest_depth_grid.clear();
            for (const auto& e : *d) {
                if (e.is_null()) {
                    c.forest_depth_grid.push_back(kNoDepthLimit);
                } else if (e.is_number_unsigned()) {
                    c.forest_depth_grid.push_back(e.get<size_t>());
                } else {
                    throw ConfigError("forest depth_grid entries must be null or unsigned");
                }
            }
        }
    }
    if (auto it = j.find("fnn"); it != j.end()) {
        read_field(*it, "hidden", c.fnn.hidden);
        read_field(*it, "dropout", c.fnn.dropout);
        read_field(*it, "learning_rate", c.fnn.learning_rate);
        read_field(*it, "batch_size", c.fnn.batch_size);
        read_field(*it, "epochs", c.fnn.epochs);
    }
    if (auto it = j.find("synth"); it != j.end()) {
        read_field(*it, "n_subjects", c.synth.n_subjects);
        read_field(*it, "tasks_per_subject", c.synth.tasks_per_subject);
        read_field(*it, "sample_rate", c.synth.sample_rate);
        read_field(*it, "coupling", c.synth.coupling);
        read_field(*it, "noise_level", c.synth.noise_level);
        read_field(*it, "base_duration_s", c.synth.base_duration_s);
        read_field(*it, "duration_spread_s", c.synth.duration_spread_s);
        read_field(*it, "emit_deep", c.synth.emit_deep);
        read_field(*it, "deep_dims", c.synth.deep_dims);
        read_field(*it, "deep_window_s", c.synth.deep_window_s);
        read_field(*it, "deep_hop_s", c.synth.deep_hop_s);
    }

    c.validate();
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    PipelineConfig c = from_json(j);

    // Paths are taken relative to the config file's directory.
    const auto base = path.parent_path();
    auto resolve = [&](std::string& p) {
        if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).string();
    };
    resolve(c.metadata_csv);
    resolve(c.audio_dir);
    resolve(c.deep_dir);
    resolve(c.features_csv);
    resolve(c.raw_features_csv);
    resolve(c.enhanced_features_csv);
    resolve(c.manifest_path);
    return c;
}

nlohmann::json PipelineConfig::to_json() const {
    nlohmann::json j;
    j["metadata_csv"] = metadata_csv;
    j["audio_dir"] = audio_dir;
    j["deep_dir"] = deep_dir;
    j["features_csv"] = features_csv;
    j["raw_features_csv"] = raw_features_csv;
    j["enhanced_features_csv"] = enhanced_features_csv;
    j["target_dbfs"] = target_dbfs;
    j["enhance"] = enhance;
    j["manifest_path"] = manifest_path;
    j["feature_source"] = feature_source;
    j["task_filter"] = task_filter;
    j["select_fraction"] = select_fraction;
    j["n_folds"] = n_folds;
    j["inner_folds"] = inner_folds;
    j["clamp_predictions"] = clamp_predictions;
    j["gender_mode"] = gender_mode;
    j["families"] = families;
    j["enhancement"] = {{"frame_ms", enhancement.frame_ms},
                        {"overlap_fraction", enhancement.overlap_fraction},
                        {"noise_frames", enhancement.noise_frames},
                        {"ddir_alpha", enhancement.ddir_alpha},
                        {"gain_floor", enhancement.gain_floor}};
    j["features"] = {{"frame_ms", features.frame_ms},
                     {"hop_ms", features.hop_ms},
                     {"pitch_frame_ms", features.pitch_frame_ms},
                     {"preemphasis", features.preemphasis},
                     {"n_mels", features.n_mels},
                     {"n_mfcc", features.n_mfcc},
                     {"log_floor", features.log_floor},
                     {"voicing_threshold", features.voicing_threshold},
                     {"f0_min_hz", features.f0_min_hz},
                     {"f0_max_hz", features.f0_max_hz},
                     {"silence_dbfs", features.silence_dbfs},
                     {"min_pause_ms", features.min_pause_ms},
                     {"delta_window", features.delta_window}};
    j["svr"] = {{"c_grid", svr_c_grid}, {"gamma_grid", svr_gamma_grid}, {"epsilon", svr_epsilon}};
    nlohmann::json depths = nlohmann::json::array();
    for (size_t d : forest_depth_grid)
        depths.push_back(d == kNoDepthLimit ? nlohmann::json() : nlohmann::json(d));
    j["forest"] = {{"trees_grid", forest_trees_grid}, {"depth_grid", depths}};
    j["fnn"] = {{"hidden", fnn.hidden},
                {"dropout", fnn.dropout},
                {"learning_rate", fnn.learning_rate},
                {"batch_size", fnn.batch_size},
                {"epochs", fnn.epochs}};
    j["synth"] = {{"n_subjects", synth.n_subjects},
                  {"tasks_per_subject", synth.tasks_per_subject},
                  {"sample_rate", synth.sample_rate},
                  {"coupling", synth.coupling},
                  {"noise_level", synth.noise_level},
                  {"base_duration_s", synth.base_duration_s},
                  {"duration_spread_s", synth.duration_spread_s},
                  {"emit_deep", synth.emit_deep},
                  {"deep_dims", synth.deep_dims},
                  {"deep_window_s", synth.deep_window_s},
                  {"deep_hop_s", synth.deep_hop_s}};
    return j;
}

void PipelineConfig::validate() const {
    enhancement.validate();
    if (feature_source != "conventional" && feature_source != "deep")
        throw ConfigError("feature_source must be 'conventional' or 'deep'");
    if (feature_source == "deep" && deep_dir.empty())
        throw ConfigError("feature_source 'deep' requires deep_dir");
    for (const auto& t : task_filter) {
        try {
            task_from_string(t);
        } catch (const FormatError&) {
            throw ConfigError("task_filter names unknown task: " + t);
        }
    }
    if (select_fraction <= 0.0 || select_fraction > 1.0)
        throw ConfigError("select_fraction outside (0, 1]");
    if (n_folds < 2) throw ConfigError("n_folds must be >= 2");
    if (inner_folds < 2) throw ConfigError("inner_folds must be >= 2");
    if (gender_mode != "separate" && gender_mode != "sliced")
        throw ConfigError("gender_mode must be 'separate' or 'sliced'");
    if (families.empty()) throw ConfigError("at least one model family required");
    for (const auto& f : families)
        if (f != "svr" && f != "forest" && f != "fnn")
            throw ConfigError("unknown model family: " + f);
    if (svr_c_grid.empty() || svr_gamma_grid.empty())
        throw ConfigError("SVR grids cannot be empty");
    for (double c : svr_c_grid)
        if (c <= 0) throw ConfigError("SVR C must be positive");
    for (double g : svr_gamma_grid)
        if (g <= 0) throw ConfigError("SVR gamma must be positive");
    if (svr_epsilon < 0) throw ConfigError("SVR epsilon cannot be negative");
    if (forest_trees_grid.empty() || forest_depth_grid.empty())
        throw ConfigError("forest grids cannot be empty");
    for (size_t t : forest_trees_grid)
        if (t == 0) throw ConfigError("forest tree count must be positive");
    if (features.frame_ms <= 0 || features.hop_ms <= 0 || features.pitch_frame_ms <= 0)
        throw ConfigError("frame parameters must be positive");
    if (features.f0_min_hz <= 0 || features.f0_max_hz <= features.f0_min_hz)
        throw ConfigError("invalid F0 search range");
    if (fnn.dropout < 0 || fnn.dropout >= 1) throw ConfigError("dropout outside [0, 1)");
    if (fnn.epochs == 0 || fnn.batch_size == 0) throw ConfigError("bad FNN training parameters");
}

std::string PipelineConfig::hash() const {
    const std::string dump = to_json().dump();
    uint64_t h = 1469598103934665603ULL; // FNV-1a 64
    for (unsigned char ch : dump) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

FamilyGrid PipelineConfig::grid_for(const std::string& family) const {
    FamilyGrid grid;
    grid.family = family;
    if (family == "svr") {
        for (double c : svr_c_grid)
            for (double g : svr_gamma_grid) {
                SvrConfig s;
                s.c = c;
                s.gamma = g;
                s.epsilon = svr_epsilon;
                grid.svr.push_back(s);
            }
    } else if (family == "forest") {
        for (size_t t : forest_trees_grid)
            for (size_t d : forest_depth_grid) {
                ForestConfig f;
                f.n_trees = t;
                f.max_depth = d;
                grid.forest.push_back(f);
            }
    } else if (family == "fnn") {
        grid.fnn.push_back(fnn);
    } else {
        throw ConfigError("unknown model family: " + family);
    }
    return grid;
}

CvOptions PipelineConfig::cv_options(uint64_t seed) const {
    CvOptions opt;
    opt.n_folds = n_folds;
    opt.inner_folds = inner_folds;
    opt.seed = seed;
    opt.select_fraction = select_fraction;
    opt.clamp_predictions = clamp_predictions;
    return opt;
}

} // namespace phq
