#include "phq/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "phq/errors.hpp"

namespace phq {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

} // namespace

int CsvTable::column_index(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV file: " + path.string());
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (first) {
            table.header = std::move(fields);
            first = false;
        } else {
            if (fields.size() != table.header.size())
                throw FormatError("CSV row width mismatch in " + path.string());
            table.rows.push_back(std::move(fields));
        }
    }
    if (first) throw DataError("CSV file has no header: " + path.string());
    return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::string out;
    for (size_t i = 0; i < table.header.size(); ++i) {
        if (i) out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    atomic_write_text(path, out);
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    }
    return std::string(buf, ptr);
}

void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write file: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("short write: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace phq
