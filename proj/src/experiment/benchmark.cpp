#include "sntl/experiment/benchmark.hpp"

#include "sntl/error.hpp"
#include "sntl/experiment/plot.hpp"
#include "sntl/gp/kriging.hpp"
#include "sntl/gp/likelihood.hpp"
#include "sntl/net/weights_io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace sntl {

namespace seeds {
namespace {
constexpr std::uint64_t kSurface = 1;
constexpr std::uint64_t kPretrain = 2;
constexpr std::uint64_t kReplicates = 3;
constexpr std::uint64_t kData = 1;
constexpr std::uint64_t kSizes = 2;
constexpr std::uint64_t kReplicateSurface = 3;
constexpr std::uint64_t kReplicatePretrain = 4;
}  // namespace

RandomState process(const ExperimentConfig& cfg, Process p) {
  return RandomState(cfg.seed).derive_child(p == Process::stationary ? 0 : 1);
}
RandomState surface(const ExperimentConfig& cfg, Process p) { return process(cfg, p).derive_child(kSurface); }
RandomState pretrain(const ExperimentConfig& cfg, Process p) { return process(cfg, p).derive_child(kPretrain); }
RandomState replicate(const ExperimentConfig& cfg, Process p, std::size_t r) {
  return process(cfg, p).derive_child(kReplicates).derive_child(r);
}
RandomState replicate_data(const RandomState& rep) { return rep.derive_child(kData); }
RandomState method(const RandomState& rep, std::size_t target_n, Method m) {
  return rep.derive_child(kSizes).derive_child(target_n).derive_child(static_cast<std::uint64_t>(m));
}
RandomState replicate_surface(const RandomState& rep) { return rep.derive_child(kReplicateSurface); }
RandomState replicate_pretrain(const RandomState& rep) { return rep.derive_child(kReplicatePretrain); }
}  // namespace seeds

namespace {
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kTrainStream = 2;

void log_line(const BenchmarkOptions& options, const std::string& message) {
  if (options.log) options.log(message);
}
}  // namespace

MultiResolutionBasis build_basis(const ExperimentConfig& cfg) { return MultiResolutionBasis::build(cfg.basis); }

PretrainResult run_pretrain(const SourceSurface& surface, const MultiResolutionBasis& basis,
                            const ExperimentConfig& cfg, const RandomState& state) {
  const Dataset& source = surface.source();
  const Eigen::MatrixXd design = basis.embed_batch(source.locations);
  RandomState init_state = state.derive_child(kInitStream);
  RandomState train_state = state.derive_child(kTrainStream);
  NetworkParams init = init_network(Architecture::spatial_default(basis.total_dim()), init_state);
  TrainResult trained = train(std::move(init), design, source.observed, cfg.pretrain, train_state);
  return {std::move(trained.params), std::move(trained.trace)};
}

void write_trace_csv(const TrainTrace& trace, const std::filesystem::path& path) {
  std::string text = "epoch,train_mse,validation_mse\n";
  for (std::size_t i = 0; i < trace.train_mse.size(); ++i) {
    text += std::to_string(i + 1) + ',' + format_double(trace.train_mse[i]) + ',';
    if (i < trace.validation_mse.size()) text += format_double(trace.validation_mse[i]);
    text += '\n';
  }
  write_file_atomically(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

NetworkParams finetune_transfer(const NetworkParams& pretrained, const Dataset& target,
                                const MultiResolutionBasis& basis, const ExperimentConfig& cfg,
                                const RandomState& replicate_state) {
  RandomState state = seeds::method(replicate_state, target.size(), Method::transfer).derive_child(kTrainStream);
  return train(pretrained, basis.embed_batch(target.locations), target.observed, cfg.finetune, state).params;
}

ReplicateResult run_replicate(Process process, std::size_t target_n, const NetworkParams& pretrained,
                              const ReplicateData& data, const MultiResolutionBasis& basis,
                              const ExperimentConfig& cfg, const RandomState& replicate_state,
                              std::size_t replicate_index) {
  const Architecture expected = Architecture::spatial_default(basis.total_dim());
  if (pretrained.architecture() != expected) {
    throw ArchitectureMismatch("run_replicate: pretrained network is " + pretrained.architecture().describe() +
                               ", basis requires " + expected.describe());
  }
  const Dataset& target = data.target(target_n);
  const Dataset& test = data.test;
  const Eigen::MatrixXd test_design = basis.embed_batch(test.locations);

  ReplicateResult result;
  auto add_row = [&](Method m, double mse) {
    result.rows.push_back({process, m, target_n, replicate_index, replicate_state.seed(), mse});
  };

  const NetworkParams transferred = finetune_transfer(pretrained, target, basis, cfg, replicate_state);
  add_row(Method::transfer, mean_squared_error(predict(transferred, test_design), test.signal));

  {
    const RandomState base = seeds::method(replicate_state, target_n, Method::target_only);
    RandomState init_state = base.derive_child(kInitStream);
    RandomState train_state = base.derive_child(kTrainStream);
    NetworkParams fresh = init_network(expected, init_state);
    const TrainResult trained =
        train(std::move(fresh), basis.embed_batch(target.locations), target.observed, cfg.target_only, train_state);
    add_row(Method::target_only, mean_squared_error(predict(trained.params, test_design), test.signal));
  }

  MaternParams kriging_params = cfg.simulation.matern;
  if (cfg.kriging_params == KrigingParamsMode::ml) {
    try {
      kriging_params = fit_matern_ml(target.locations, target.observed).params;
    } catch (const FitFailed&) {
      result.kriging_fallback = true;
    } catch (const PreconditionError&) {
      result.kriging_fallback = true;
    }
  }
  const KrigingModel model(target.locations, target.observed, kriging_params);
  add_row(Method::kriging, mean_squared_error(model.predict(test.locations), test.signal));
  return result;
}

namespace {

struct UnitOutcome {
  std::vector<ReplicateResult> per_size;
  std::optional<std::string> failure;
};

std::size_t worker_count(const ExperimentConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) fn(i);
  };
  workers = std::min(workers, count);
  if (workers <= 1) {
    loop();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(loop);
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

BenchmarkResult run_benchmark(const ExperimentConfig& cfg, const BenchmarkOptions& options) {
  cfg.validate();
  const MultiResolutionBasis basis = build_basis(cfg);
  const std::size_t workers = worker_count(cfg);
  const std::size_t n_proc = cfg.processes.size();
  std::mutex log_mutex;
  auto log = [&](const std::string& msg) {
    std::lock_guard lock(log_mutex);
    log_line(options, msg);
  };

  // Shared surfaces and pretraining, one per process.
  std::vector<std::optional<SourceSurface>> surfaces(n_proc);
  std::vector<std::optional<PretrainResult>> pretrained(n_proc);
  if (!cfg.pretrain_per_replicate) {
    parallel_for(n_proc, workers, [&](std::size_t i) {
      const Process p = cfg.processes[i];
      log("pretrain " + std::string(to_string(p)) + ": drawing source surface");
      surfaces[i] = SourceSurface::draw(p, cfg.simulation, seeds::surface(cfg, p));
      pretrained[i] = run_pretrain(*surfaces[i], basis, cfg, seeds::pretrain(cfg, p));
      log("pretrain " + std::string(to_string(p)) + ": final train mse " +
          (pretrained[i]->trace.train_mse.empty() ? std::string("n/a")
                                                  : format_double(pretrained[i]->trace.train_mse.back())));
    });
  }

  const std::size_t units = n_proc * cfg.replicates;
  std::vector<UnitOutcome> outcomes(units);
  std::atomic<std::size_t> done{0};
  parallel_for(units, workers, [&](std::size_t u) {
    const std::size_t pi = u / cfg.replicates;
    const std::size_t r = u % cfg.replicates;
    const Process p = cfg.processes[pi];
    const RandomState rep = seeds::replicate(cfg, p, r);
    UnitOutcome& outcome = outcomes[u];
    try {
      std::optional<SourceSurface> own_surface;
      std::optional<PretrainResult> own_pretrain;
      const SourceSurface* surface = surfaces[pi] ? &*surfaces[pi] : nullptr;
      const NetworkParams* weights = pretrained[pi] ? &pretrained[pi]->params : nullptr;
      if (cfg.pretrain_per_replicate) {
        own_surface = SourceSurface::draw(p, cfg.simulation, seeds::replicate_surface(rep));
        own_pretrain = run_pretrain(*own_surface, basis, cfg, seeds::replicate_pretrain(rep));
        surface = &*own_surface;
        weights = &own_pretrain->params;
      }
      const ReplicateData data = draw_replicate(*surface, cfg.target_sizes, seeds::replicate_data(rep));
      for (std::size_t n : cfg.target_sizes) {
        outcome.per_size.push_back(run_replicate(p, n, *weights, data, basis, cfg, rep, r));
      }
    } catch (const std::exception& e) {
      outcome.per_size.clear();
      outcome.failure = std::string(to_string(p)) + " replicate " + std::to_string(r) + ": " + e.what();
    }
    log("replicate " + std::to_string(++done) + "/" + std::to_string(units) + " done (" +
        std::string(to_string(p)) + " #" + std::to_string(r) + ")");
  });

  BenchmarkResult result;
  for (std::size_t pi = 0; pi < n_proc; ++pi) {
    for (std::size_t si = 0; si < cfg.target_sizes.size(); ++si) {
      for (std::size_t r = 0; r < cfg.replicates; ++r) {
        const UnitOutcome& outcome = outcomes[pi * cfg.replicates + r];
        if (outcome.failure) continue;
        const ReplicateResult& cell = outcome.per_size[si];
        result.report.rows.insert(result.report.rows.end(), cell.rows.begin(), cell.rows.end());
        if (cell.kriging_fallback) ++result.report.kriging_fallbacks;
      }
    }
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      const UnitOutcome& outcome = outcomes[pi * cfg.replicates + r];
      if (outcome.failure) result.report.failures.push_back(*outcome.failure);
    }
    if (pretrained[pi]) result.pretrained.emplace(cfg.processes[pi], std::move(*pretrained[pi]));
  }
  if (!result.report.failures.empty()) {
    log("warning: " + std::to_string(result.report.failures.size()) + " replicate(s) failed and were excluded");
  }

  if (options.write_outputs) {
    std::filesystem::create_directories(cfg.output_dir);
    for (const auto& [process, pre] : result.pretrained) {
      const auto dir = cfg.output_dir / std::string(to_string(process));
      std::filesystem::create_directories(dir);
      save_weights(pre.params, dir / "pretrained.sntl");
      write_trace_csv(pre.trace, dir / "pretrain_trace.csv");
    }
    if (!result.report.rows.empty()) {
      write_csv(result.report, cfg.output_dir / "mse.csv");
      render_plot_svg(result.report, cfg.output_dir / "mse.svg");
    }
    const std::string summary = summary_text(result.report);
    write_file_atomically(cfg.output_dir / "summary.txt",
                          std::span(reinterpret_cast<const std::uint8_t*>(summary.data()), summary.size()));
  }
  return result;
}

std::string summary_text(const MseReport& report) {
  std::ostringstream out;
  out << "process,method,target_n,count,mean_mse,std_error\n";
  const auto cells = report.aggregate();
  for (const auto& c : cells) {
    out << to_string(c.process) << ',' << to_string(c.method) << ',' << c.target_n << ',' << c.count << ','
        << format_double(c.mean) << ',' << format_double(c.std_error) << '\n';
  }
  out << "\npaired win rate of transfer\n";
  std::vector<std::pair<Process, std::size_t>> seen;
  for (const auto& c : cells) {
    const std::pair key{c.process, c.target_n};
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    const auto transfer = report.values(c.process, Method::transfer, c.target_n);
    for (Method other : {Method::target_only, Method::kriging}) {
      const auto rival = report.values(c.process, other, c.target_n);
      if (rival.size() != transfer.size() || transfer.empty()) continue;
      std::size_t wins = 0;
      for (std::size_t i = 0; i < transfer.size(); ++i) wins += transfer[i] < rival[i] ? 1 : 0;
      out << to_string(c.process) << " n=" << c.target_n << " vs " << to_string(other) << ": " << wins << '/'
          << transfer.size() << '\n';
    }
  }
  out << "\nkriging fallbacks to generating parameters: " << report.kriging_fallbacks << '\n';
  out << "excluded replicates: " << report.failures.size() << '\n';
  for (const auto& f : report.failures) out << "  " << f << '\n';
  return out.str();
}

void append_manifest(const std::filesystem::path& dir, std::string_view command, const ExperimentConfig& cfg) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.jsonl", std::ios::app);
  if (!out) throw IoError("cannot append to manifest in '" + dir.string() + "'");
  out << "{\"command\":\"" << command << "\",\"config_hash\":\"" << config_hash(cfg) << "\",\"seed\":" << cfg.seed
      << ",\"version\":\"" << kVersion << "\",\"time\":\"" << timestamp_utc() << "\"}\n";
}

}  // namespace sntl
