#include "sntl/cli.hpp"

#include "sntl/error.hpp"
#include "sntl/experiment/benchmark.hpp"
#include "sntl/experiment/plot.hpp"
#include "sntl/net/weights_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

namespace sntl {

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw FormatError("csv: missing column '" + name + "'");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CsvTable read_csv_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("csv: '" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split_line(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto cells = split_line(line);
    if (cells.size() != table.header.size()) {
      throw FormatError("csv: row with " + std::to_string(cells.size()) + " cells in '" + path.string() + "'");
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out_dir;
};

ExperimentConfig resolve_config(const CommonArgs& args) {
  ExperimentConfig cfg = args.config_path.empty() ? ExperimentConfig{} : load_config(args.config_path);
  if (const char* env = std::getenv("SNTL_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (args.seed) cfg.seed = *args.seed;
  if (args.threads) cfg.threads = *args.threads;
  cfg.validate();
  return cfg;
}

std::filesystem::path parent_or_cwd(const std::filesystem::path& file) {
  return file.has_parent_path() ? file.parent_path() : std::filesystem::path(".");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  write_file_atomically(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

double parse_double(const std::string& cell) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::logic_error&) {
    throw FormatError("csv: '" + cell + "' is not a number");
  }
  if (used != cell.size()) throw FormatError("csv: '" + cell + "' is not a number");
  return v;
}

void append_dataset_rows(std::string& text, const Dataset& d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    text += std::string(to_string(d.role)) + ',' + format_double(d.locations[i].s1) + ',' +
            format_double(d.locations[i].s2) + ',' + format_double(d.signal[k]) + ',' +
            format_double(d.observed[k]) + '\n';
  }
}

struct PointRows {
  std::vector<Location> locations;
  std::vector<double> observed;
};

PointRows read_points(const std::filesystem::path& path, const std::string& role, bool need_observed) {
  const CsvTable table = read_csv_table(path);
  const std::size_t c1 = table.column("s1");
  const std::size_t c2 = table.column("s2");
  std::optional<std::size_t> role_col;
  if (!role.empty()) role_col = table.column("role");
  std::optional<std::size_t> obs_col;
  if (need_observed) obs_col = table.column("observed");
  PointRows out;
  for (const auto& row : table.rows) {
    if (role_col && row[*role_col] != role) continue;
    out.locations.push_back({parse_double(row[c1]), parse_double(row[c2])});
    if (obs_col) out.observed.push_back(parse_double(row[*obs_col]));
  }
  return out;
}

std::string help_footer() {
  std::string footer = R"(
File formats:
  simulate   writes CSV  role,s1,s2,signal,observed  (role: source|target|test)
  pretrain   writes <out>/<process>/pretrained.sntl and pretrain_trace.csv
             (epoch,train_mse,validation_mse)
  finetune   reads target rows (role,s1,s2,observed) of a simulate CSV and an
             .sntl file; writes the fine-tuned .sntl
  predict    reads CSV with columns s1,s2 (others ignored); writes s1,s2,prediction
  benchmark  writes <out>/mse.csv (process,method,target_n,replicate,seed,mse),
             mse.svg, summary.txt and per-process pretrained weights and traces
  plot       reads an mse.csv; writes the SVG figure
  Every command appends a line to manifest.jsonl in its output directory.

Weight files (.sntl): "SNTL", u16 version, u16 layer count, then per layer
  u32 out_dim, u32 in_dim, row-major f64 weights, f64 bias; trailing CRC-32 of
  all bytes after the magic. Little-endian throughout.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
The output directory is taken from --out-dir, else SNTL_OUTPUT_DIR, else the config.

)";
  footer += config_schema_help();
  return footer;
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial transfer learning: basis-embedded networks, Kriging and the simulation benchmark", "sntl"};
  app.footer(help_footer());
  app.require_subcommand(1, 1);
  app.fallthrough();

  CommonArgs common;
  bool quiet = false;
  int verbose = 0;
  app.add_flag("-q,--quiet", quiet, "Suppress progress messages");
  app.add_flag("-v,--verbose", verbose, "Also print the run summary and config hash");

  auto add_common = [&](CLI::App* sub, bool with_threads) {
    sub->add_option("-c,--config", common.config_path, "Experiment configuration (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "Master seed (overrides the config)");
    if (with_threads) sub->add_option("--threads", common.threads, "Worker threads (0: all cores)");
  };

  std::string process_name;
  std::size_t replicate = 0;
  std::optional<std::size_t> target_n;
  std::string out_path;
  std::string weights_path;
  std::string data_path;
  std::string points_path;
  std::string role;
  std::string report_path;

  CLI::App* simulate = app.add_subcommand("simulate", "Export one replicate's source, target and test data as CSV");
  add_common(simulate, false);
  simulate->add_option("--process", process_name, "stationary | nonstationary")->required();
  simulate->add_option("--replicate", replicate, "Replicate index (default 0)");
  simulate->add_option("--target-n", target_n, "Target size to export (default: first configured size)");
  simulate->add_option("-o,--out", out_path, "Output CSV")->required();

  CLI::App* pretrain = app.add_subcommand("pretrain", "Train on the source surface and save weights and trace");
  add_common(pretrain, false);
  pretrain->add_option("--process", process_name, "stationary | nonstationary")->required();
  pretrain->add_option("--out-dir", common.out_dir, "Output directory");

  CLI::App* finetune = app.add_subcommand("finetune", "Fine-tune pretrained weights on a simulate CSV's target rows");
  add_common(finetune, false);
  finetune->add_option("--process", process_name, "stationary | nonstationary")->required();
  finetune->add_option("--replicate", replicate, "Replicate index whose seed stream to use (default 0)");
  finetune->add_option("-w,--weights", weights_path, "Pretrained .sntl file")->required()->check(CLI::ExistingFile);
  finetune->add_option("--data", data_path, "CSV from simulate")->required()->check(CLI::ExistingFile);
  finetune->add_option("-o,--out", out_path, "Output .sntl file")->required();

  CLI::App* predict_cmd = app.add_subcommand("predict", "Predict at points with saved weights");
  add_common(predict_cmd, false);
  predict_cmd->add_option("-w,--weights", weights_path, ".sntl file")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--points", points_path, "CSV with s1,s2 columns")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--role", role, "Only rows whose role column equals this value");
  predict_cmd->add_option("-o,--out", out_path, "Output CSV")->required();

  CLI::App* benchmark = app.add_subcommand("benchmark", "Run the full transfer / target-only / Kriging comparison");
  add_common(benchmark, true);
  benchmark->add_option("--out-dir", common.out_dir, "Output directory");

  CLI::App* plot = app.add_subcommand("plot", "Render an mse.csv as SVG");
  plot->add_option("--report", report_path, "mse.csv from benchmark")->required()->check(CLI::ExistingFile);
  plot->add_option("-o,--out", out_path, "Output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "sntl: " << e.what() << "\n" << app.help();
    return 1;
  }

  auto log = [&](std::string_view msg) {
    if (!quiet) err << msg << '\n';
  };

  try {
    std::optional<ExperimentConfig> cfg;
    try {
      if (app.got_subcommand(plot)) {
        cfg.reset();
      } else {
        cfg = resolve_config(common);
      }
      if (!process_name.empty()) parse_process(process_name);
      if (cfg && verbose > 0) err << "config hash " << config_hash(*cfg) << ", seed " << cfg->seed << '\n';
    } catch (const ConfigError& e) {
      err << "sntl: " << e.what() << '\n';
      return 1;
    }

    if (app.got_subcommand(simulate)) {
      const Process p = parse_process(process_name);
      const std::size_t n = target_n.value_or(cfg->target_sizes.front());
      if (std::find(cfg->target_sizes.begin(), cfg->target_sizes.end(), n) == cfg->target_sizes.end()) {
        err << "sntl: --target-n " << n << " is not among the configured target sizes\n";
        return 1;
      }
      const SourceSurface surface = SourceSurface::draw(p, cfg->simulation, seeds::surface(*cfg, p));
      const ReplicateData data =
          draw_replicate(surface, cfg->target_sizes, seeds::replicate_data(seeds::replicate(*cfg, p, replicate)));
      std::string text = "role,s1,s2,signal,observed\n";
      append_dataset_rows(text, surface.source());
      append_dataset_rows(text, data.target(n));
      append_dataset_rows(text, data.test);
      write_text(out_path, text);
      append_manifest(parent_or_cwd(out_path), "simulate", *cfg);
      log("wrote " + out_path);
      return 0;
    }

    if (app.got_subcommand(pretrain)) {
      const Process p = parse_process(process_name);
      const MultiResolutionBasis basis = build_basis(*cfg);
      log("drawing source surface");
      const SourceSurface surface = SourceSurface::draw(p, cfg->simulation, seeds::surface(*cfg, p));
      log("training");
      const PretrainResult result = run_pretrain(surface, basis, *cfg, seeds::pretrain(*cfg, p));
      const auto dir = cfg->output_dir / std::string(to_string(p));
      std::filesystem::create_directories(dir);
      save_weights(result.params, dir / "pretrained.sntl");
      write_trace_csv(result.trace, dir / "pretrain_trace.csv");
      append_manifest(cfg->output_dir, "pretrain", *cfg);
      log("wrote " + (dir / "pretrained.sntl").string());
      return 0;
    }

    if (app.got_subcommand(finetune)) {
      const Process p = parse_process(process_name);
      const MultiResolutionBasis basis = build_basis(*cfg);
      const NetworkParams pretrained =
          load_weights(weights_path, Architecture::spatial_default(basis.total_dim()));
      const PointRows rows = read_points(data_path, "target", true);
      if (rows.locations.empty()) throw EmptyDataset("finetune: no target rows in '" + data_path + "'");
      Dataset target;
      target.role = DatasetRole::target;
      target.process = p;
      target.locations = rows.locations;
      target.observed = Eigen::Map<const Eigen::VectorXd>(rows.observed.data(),
                                                          static_cast<Eigen::Index>(rows.observed.size()));
      const NetworkParams tuned =
          finetune_transfer(pretrained, target, basis, *cfg, seeds::replicate(*cfg, p, replicate));
      if (std::filesystem::path(out_path).has_parent_path()) {
        std::filesystem::create_directories(std::filesystem::path(out_path).parent_path());
      }
      save_weights(tuned, out_path);
      append_manifest(parent_or_cwd(out_path), "finetune", *cfg);
      log("wrote " + out_path);
      return 0;
    }

    if (app.got_subcommand(predict_cmd)) {
      const MultiResolutionBasis basis = build_basis(*cfg);
      const NetworkParams params = load_weights(weights_path, Architecture::spatial_default(basis.total_dim()));
      const PointRows rows = read_points(points_path, role, false);
      const Eigen::VectorXd preds = predict(params, basis.embed_batch(rows.locations));
      std::string text = "s1,s2,prediction\n";
      for (std::size_t i = 0; i < rows.locations.size(); ++i) {
        text += format_double(rows.locations[i].s1) + ',' + format_double(rows.locations[i].s2) + ',' +
                format_double(preds[static_cast<Eigen::Index>(i)]) + '\n';
      }
      write_text(out_path, text);
      append_manifest(parent_or_cwd(out_path), "predict", *cfg);
      log("wrote " + std::to_string(rows.locations.size()) + " predictions to " + out_path);
      return 0;
    }

    if (app.got_subcommand(benchmark)) {
      BenchmarkOptions options;
      options.log = log;
      const BenchmarkResult result = run_benchmark(*cfg, options);
      append_manifest(cfg->output_dir, "benchmark", *cfg);
      if (!quiet) out << summary_text(result.report);
      return 0;
    }

    if (app.got_subcommand(plot)) {
      const MseReport report = read_csv(report_path);
      if (std::filesystem::path(out_path).has_parent_path()) {
        std::filesystem::create_directories(std::filesystem::path(out_path).parent_path());
      }
      render_plot_svg(report, out_path);
      std::ofstream manifest(parent_or_cwd(out_path) / "manifest.jsonl", std::ios::app);
      manifest << "{\"command\":\"plot\",\"report\":\"" << report_path << "\",\"version\":\"" << kVersion << "\"}\n";
      log("wrote " + out_path);
      return 0;
    }
  } catch (const std::exception& e) {
    err << "sntl: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace sntl
