#include "phq/deep.hpp"

#include <charconv>
#include <cmath>

#include "phq/csv.hpp"
#include "phq/errors.hpp"

namespace phq {

namespace {

bool is_sep(char c) { return c == ',' || c == ' ' || c == '\t'; }

void parse_row(const std::string& line, size_t line_no, std::vector<double>& out) {
    size_t i = 0;
    const size_t n = line.size();
    while (i < n) {
        while (i < n && is_sep(line[i])) ++i;
        if (i >= n) break;
        size_t j = i;
        while (j < n && !is_sep(line[j])) ++j;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, v);
        if (ec != std::errc() || ptr != line.data() + j)
            throw FormatError("non-numeric value at line " + std::to_string(line_no) + ": " +
                              line.substr(i, j - i));
        out.push_back(v);
        i = j;
    }
}

} // namespace

DeepFeatureMatrix ingest_deep_features(const std::filesystem::path& path) {
    const std::string text = read_text(path);

    DeepFeatureMatrix m;
    m.sample_id = path.stem().string();

    std::vector<double> row;
    size_t pos = 0, line_no = 0;
    while (pos <= text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        row.clear();
        parse_row(line, line_no, row);
        if (row.empty()) continue;
        if (m.dims == 0) {
            m.dims = row.size();
        } else if (row.size() != m.dims) {
            throw FormatError("ragged matrix at line " + std::to_string(line_no) + ": expected " +
                              std::to_string(m.dims) + " values, got " +
                              std::to_string(row.size()));
        }
        m.values.insert(m.values.end(), row.begin(), row.end());
        if (end == text.size()) break;
    }

    if (m.values.empty()) throw EmptyInputError("deep feature file has no rows: " + path.string());
    return m;
}

std::vector<double> aggregate_deep(const DeepFeatureMatrix& m) {
    if (m.rows() == 0) throw EmptyInputError("cannot aggregate empty matrix");
    const size_t rows = m.rows(), dims = m.dims;

    std::vector<double> out(2 * dims, 0.0);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < dims; ++c) out[c] += m.at(r, c);
    for (size_t c = 0; c < dims; ++c) out[c] /= double(rows);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < dims; ++c) {
            const double d = m.at(r, c) - out[c];
            out[dims + c] += d * d;
        }
    for (size_t c = 0; c < dims; ++c) out[dims + c] = std::sqrt(out[dims + c] / double(rows));
    return out;
}

std::vector<std::string> deep_feature_names(size_t dims) {
    std::vector<std::string> names;
    names.reserve(2 * dims);
    for (size_t c = 0; c < dims; ++c) names.push_back("deep" + std::to_string(c) + "_mean");
    for (size_t c = 0; c < dims; ++c) names.push_back("deep" + std::to_string(c) + "_std");
    return names;
}

} // namespace phq
