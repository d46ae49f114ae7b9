#include "phq/dataio.hpp"

#include <charconv>
#include <set>

#include "phq/csv.hpp"
#include "phq/errors.hpp"

namespace phq {

namespace {

double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw FormatError("bad " + what + ": " + s);
    return v;
}

int parse_int(const std::string& s, const std::string& what) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw FormatError("bad " + what + ": " + s);
    return v;
}

} // namespace

std::vector<SampleMeta> load_metadata(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    const std::vector<std::string> expected = {"sample_id", "subject_id", "gender",
                                               "task",      "phq8",       "duration_s"};
    if (table.header != expected)
        throw FormatError("metadata header must be sample_id,subject_id,gender,task,phq8,duration_s");

    std::vector<SampleMeta> metas;
    std::set<std::string> seen;
    for (const auto& row : table.rows) {
        SampleMeta m;
        m.sample_id = row[0];
        m.subject_id = row[1];
        m.gender = gender_from_string(row[2]);
        m.task = task_from_string(row[3]);
        m.phq8 = parse_int(row[4], "phq8");
        m.duration_s = parse_double(row[5], "duration_s");
        if (m.sample_id.empty() || m.subject_id.empty())
            throw FormatError("metadata row with empty id");
        if (m.phq8 < 0 || m.phq8 > 24)
            throw DataError("PHQ-8 outside [0, 24] for sample " + m.sample_id);
        if (m.duration_s < 0) throw DataError("negative duration for sample " + m.sample_id);
        if (!seen.insert(m.sample_id).second)
            throw DataError("duplicate sample_id: " + m.sample_id);
        metas.push_back(std::move(m));
    }
    if (metas.empty()) throw DataError("metadata file has no samples: " + path.string());
    return metas;
}

void save_metadata(const std::filesystem::path& path, const std::vector<SampleMeta>& metas) {
    CsvTable table;
    table.header = {"sample_id", "subject_id", "gender", "task", "phq8", "duration_s"};
    for (const auto& m : metas)
        table.rows.push_back({m.sample_id, m.subject_id, to_string(m.gender), to_string(m.task),
                              std::to_string(m.phq8), format_double(m.duration_s)});
    write_csv(path, table);
}

void save_feature_matrix(const std::filesystem::path& path, const FeatureMatrix& m) {
    m.check_rectangular();
    CsvTable table;
    table.header.push_back("sample_id");
    for (const auto& n : m.names) table.header.push_back(n);
    for (size_t r = 0; r < m.rows(); ++r) {
        std::vector<std::string> row;
        row.reserve(m.cols() + 1);
        row.push_back(m.sample_ids[r]);
        for (size_t c = 0; c < m.cols(); ++c) row.push_back(format_double(m.at(r, c)));
        table.rows.push_back(std::move(row));
    }
    write_csv(path, table);
}

FeatureMatrix load_feature_matrix(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    if (table.header.empty() || table.header[0] != "sample_id")
        throw FormatError("feature CSV must start with a sample_id column");

    FeatureMatrix m;
    m.names.assign(table.header.begin() + 1, table.header.end());
    if (m.names.empty()) throw FormatError("feature CSV has no feature columns");
    for (const auto& row : table.rows) {
        m.sample_ids.push_back(row[0]);
        for (size_t c = 1; c < row.size(); ++c)
            m.values.push_back(parse_double(row[c], "feature value"));
    }
    m.check_rectangular();
    return m;
}

void save_flags(const std::filesystem::path& path, const FlagMap& flags) {
    CsvTable table;
    table.header = {"sample_id", "flagged_entry"};
    for (const auto& [id, entries] : flags)
        for (const auto& e : entries) table.rows.push_back({id, e});
    write_csv(path, table);
}

FlagMap load_flags(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    if (table.header != std::vector<std::string>{"sample_id", "flagged_entry"})
        throw FormatError("flags header must be sample_id,flagged_entry");
    FlagMap out;
    for (const auto& row : table.rows) out[row[0]].push_back(row[1]);
    return out;
}

} // namespace phq
