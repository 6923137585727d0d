#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "singsurf/config.hpp"
#include "singsurf/csv.hpp"

namespace singsurf::app {

// Experiments selectable through the "experiment" key.
inline const std::vector<std::string>& experiments() {
  static const std::vector<std::string> names{"shock", "shock-analytic", "lwe", "lwe-fds", "analyze"};
  return names;
}

struct RunOutput {
  std::string experiment;
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> files;  // every file written, manifest included
  std::string summary;                       // short human-readable report
};

// Runs cfg in out_dir (created when missing) and writes a manifest,
// per-snapshot CSV and SVG files. When a solver fails part way, the files
// produced so far and a manifest with run.status = failed stay on disk, out
// lists them, and the error is rethrown.
void run(const config::Config& cfg, const std::filesystem::path& out_dir, RunOutput& out);

// Comparison region over the first column of the first file.
//   all | range:LO:HI | behind:FRONT:CELLS | ahead:FRONT:CELLS
// behind keeps x <= FRONT - CELLS dx, ahead keeps x >= FRONT + CELLS dx, with
// dx the spacing of the first file.
struct Region {
  enum class Kind { all, range, behind, ahead };
  Kind kind = Kind::all;
  double a = 0, b = 0;
  std::string text = "all";
};
Region parse_region(const std::string& text);  // throws UsageError

struct CompareReport {
  std::string column;
  std::string region;
  std::size_t points = 0;
  double max_abs = 0;
  double mean_abs = 0;
  double max_at = 0;  // abscissa of the largest difference

  std::string line() const;  // one machine-readable record
};

// Compares column `column` (empty selects the second column) of a and b.
// b is interpolated linearly onto a's abscissae when the grids differ.
// Throws UsageError on incompatible tables or an empty region.
CompareReport compare(const io::Table& a, const io::Table& b, const Region& region, const std::string& column = {});
CompareReport compare_files(const std::filesystem::path& a, const std::filesystem::path& b,
                            const std::string& region, const std::string& column = {});

}  // namespace singsurf::app
