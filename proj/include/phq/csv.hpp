#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace phq {

// Minimal CSV: comma-separated, first line is the header, no quoting
// (field values in this pipeline never contain commas).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const; // -1 if absent
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

// Write-to-temp-then-rename so readers never observe partial files.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

std::string read_text(const std::filesystem::path& path);

} // namespace phq
