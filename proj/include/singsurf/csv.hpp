#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace singsurf::io {

// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // column-major; NaN is written as an empty cell

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  const std::vector<double>& column(const std::string& name) const;
  bool has_column(const std::string& name) const;

  std::string to_csv() const;
};

Table parse_csv(const std::string& text);
Table read_csv(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace singsurf::io
