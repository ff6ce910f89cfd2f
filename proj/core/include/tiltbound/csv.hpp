#pragma once

#include <string>
#include <vector>

namespace tiltbound {

// Decimal rendering used by every CSV artifact: 17 significant digits, enough for
// an exact double round trip, so re-parsing an emitted file reproduces the values.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

std::string render_csv(const CsvTable& table);

// Parses a CSV of decimal columns. If the first line is non-numeric it is taken as
// the header. Throws std::runtime_error on malformed rows.
CsvTable read_csv(const std::string& path);

// Reads a one-column file of decimal literals (no header).
std::vector<double> read_value_lines(const std::string& path);

// Writes content to path atomically: temp file in the same directory, then rename.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);
bool file_exists(const std::string& path);

}  // namespace tiltbound
