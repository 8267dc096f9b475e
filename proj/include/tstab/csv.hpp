#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// Locale-independent CSV helpers. Numbers are written in the shortest form
// that parses back to the identical double.
namespace tstab::csv {

std::string format_number(double value);
double parse_number(std::string_view text);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Header row plus data rows. Blank lines are skipped; CR before LF is tolerated.
Table parse(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace tstab::csv
