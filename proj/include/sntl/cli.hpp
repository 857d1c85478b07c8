#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace sntl {

/// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Minimal comma-separated table: a header row and string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws FormatError if the column is missing.
  std::size_t column(const std::string& name) const;
};

/// Throws IoError or FormatError (ragged rows).
CsvTable read_csv_table(const std::filesystem::path& path);

}  // namespace sntl
