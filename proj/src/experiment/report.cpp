#include "sntl/experiment/report.hpp"

#include "sntl/error.hpp"
#include "sntl/net/weights_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace sntl {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::transfer: return "transfer";
    case Method::target_only: return "target_only";
    case Method::kriging: return "kriging";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (to_string(m) == name) return m;
  }
  throw FormatError("unknown method '" + std::string(name) + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<CellSummary> MseReport::aggregate() const {
  using Key = std::tuple<Process, Method, std::size_t>;
  std::vector<Key> order;
  std::map<Key, std::vector<double>> groups;
  for (const auto& row : rows) {
    const Key key{row.process, row.method, row.target_n};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(row.mse);
  }
  std::vector<CellSummary> out;
  for (const Key& key : order) {
    const auto& v = groups.at(key);
    CellSummary s{std::get<0>(key), std::get<1>(key), std::get<2>(key), v.size(), 0.0, 0.0};
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - s.mean) * (x - s.mean);
      s.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
    }
    out.push_back(s);
  }
  return out;
}

std::optional<CellSummary> MseReport::cell(Process p, Method m, std::size_t n) const {
  for (const auto& s : aggregate()) {
    if (s.process == p && s.method == m && s.target_n == n) return s;
  }
  return std::nullopt;
}

std::vector<double> MseReport::values(Process p, Method m, std::size_t n) const {
  std::vector<std::pair<std::size_t, double>> tagged;
  for (const auto& row : rows) {
    if (row.process == p && row.method == m && row.target_n == n) tagged.emplace_back(row.replicate, row.mse);
  }
  std::sort(tagged.begin(), tagged.end());
  std::vector<double> out;
  for (const auto& [r, v] : tagged) out.push_back(v);
  return out;
}

std::string csv_text(const MseReport& report) {
  std::string out = "process,method,target_n,replicate,seed,mse\n";
  for (const auto& row : report.rows) {
    out += to_string(row.process);
    out += ',';
    out += to_string(row.method);
    out += ',' + std::to_string(row.target_n) + ',' + std::to_string(row.replicate) + ',' +
           std::to_string(row.seed) + ',' + format_double(row.mse) + '\n';
  }
  if (!report.failures.empty()) {
    out += "# excluded_replicates=" + std::to_string(report.failures.size()) + '\n';
  }
  return out;
}

void write_csv(const MseReport& report, const std::filesystem::path& path) {
  if (report.rows.empty()) throw Error("write_csv: report has no rows");
  const std::string text = csv_text(report);
  write_file_atomically(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

MseReport read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "process,method,target_n,replicate,seed,mse") {
    throw FormatError("mse csv: unexpected header in '" + path.string() + "'");
  }
  MseReport report;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::stringstream fields(line);
    std::string process, method, n, rep, seed, mse;
    if (!std::getline(fields, process, ',') || !std::getline(fields, method, ',') ||
        !std::getline(fields, n, ',') || !std::getline(fields, rep, ',') || !std::getline(fields, seed, ',') ||
        !std::getline(fields, mse)) {
      throw FormatError("mse csv: malformed line '" + line + "'");
    }
    try {
      MseRow row;
      row.process = parse_process(process);
      row.method = parse_method(method);
      row.target_n = std::stoull(n);
      row.replicate = std::stoull(rep);
      row.seed = std::stoull(seed);
      row.mse = std::stod(mse);
      report.rows.push_back(row);
    } catch (const std::logic_error&) {
      throw FormatError("mse csv: malformed line '" + line + "'");
    } catch (const ConfigError&) {
      throw FormatError("mse csv: malformed line '" + line + "'");
    }
  }
  return report;
}

}  // namespace sntl
