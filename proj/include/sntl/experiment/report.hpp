#pragma once

#include "sntl/surfaces.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sntl {

enum class Method { transfer, target_only, kriging };

inline constexpr Method kAllMethods[] = {Method::transfer, Method::target_only, Method::kriging};

std::string_view to_string(Method m);
/// Throws FormatError for unknown names.
Method parse_method(std::string_view name);

struct MseRow {
  Process process = Process::stationary;
  Method method = Method::transfer;
  std::size_t target_n = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  double mse = 0.0;

  friend bool operator==(const MseRow&, const MseRow&) = default;
};

struct CellSummary {
  Process process = Process::stationary;
  Method method = Method::transfer;
  std::size_t target_n = 0;
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(count); 0 for one row
};

struct MseReport {
  std::vector<MseRow> rows;
  /// (process, replicate) units dropped after a hard failure, with reasons.
  std::vector<std::string> failures;
  /// Replicate cells whose Kriging fell back to the generating parameters.
  std::size_t kriging_fallbacks = 0;

  /// One entry per (process, method, n) in row order of first appearance.
  std::vector<CellSummary> aggregate() const;
  std::optional<CellSummary> cell(Process p, Method m, std::size_t n) const;
  /// MSEs of one cell, ordered by replicate.
  std::vector<double> values(Process p, Method m, std::size_t n) const;
};

/// Header `process,method,target_n,replicate,seed,mse`, one line per row,
/// floats with 17 significant digits, LF endings. A trailing comment line
/// reports excluded replicates when there are any.
std::string csv_text(const MseReport& report);

/// Throws Error for an empty report (nothing is written) and IoError.
void write_csv(const MseReport& report, const std::filesystem::path& path);

/// Throws FormatError or IoError.
MseReport read_csv(const std::filesystem::path& path);

/// "%.17g"
std::string format_double(double v);

}  // namespace sntl
