#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace daa {

// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);
// "NA" for a missing value.
std::string format_optional(const std::optional<double>& v);

// Strict parse of a full token; throws IoError on trailing garbage.
double parse_double(std::string_view text);
std::optional<double> parse_optional(std::string_view text);

// Minimal CSV: comma-separated, no quoting (all fields here are numeric or
// identifier-like). Lines starting with '#' and blank lines are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace daa
