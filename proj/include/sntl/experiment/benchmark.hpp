#pragma once

#include "sntl/basis.hpp"
#include "sntl/experiment/config.hpp"
#include "sntl/experiment/report.hpp"
#include "sntl/net/network.hpp"
#include "sntl/net/train.hpp"
#include "sntl/numerics/random.hpp"
#include "sntl/surfaces.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <string_view>

namespace sntl {

/// Seed hierarchy. Every stream is a pure function of the master seed and
/// the indices on its path, so adding replicates or sizes, or changing the
/// thread count, leaves existing streams untouched:
///
///   master -> process -> surface
///                     -> pretrain -> {init, train}
///                     -> replicate r -> data
///                                    -> size n -> method -> {init, train}
///                                    -> surface, pretrain (per-replicate pretraining only)
namespace seeds {
RandomState process(const ExperimentConfig& cfg, Process p);
RandomState surface(const ExperimentConfig& cfg, Process p);
RandomState pretrain(const ExperimentConfig& cfg, Process p);
RandomState replicate(const ExperimentConfig& cfg, Process p, std::size_t r);
RandomState replicate_data(const RandomState& replicate);
RandomState method(const RandomState& replicate, std::size_t target_n, Method m);
RandomState replicate_surface(const RandomState& replicate);
RandomState replicate_pretrain(const RandomState& replicate);
}  // namespace seeds

MultiResolutionBasis build_basis(const ExperimentConfig& cfg);

struct PretrainResult {
  NetworkParams params;
  TrainTrace trace;
};

/// Embeds the source data and trains a freshly initialized network on it.
/// `state` is the pretrain stream (see seeds::pretrain).
PretrainResult run_pretrain(const SourceSurface& surface, const MultiResolutionBasis& basis,
                            const ExperimentConfig& cfg, const RandomState& state);

/// Header `epoch,train_mse,validation_mse`; one line per epoch, the last
/// column empty when no validation split was used.
void write_trace_csv(const TrainTrace& trace, const std::filesystem::path& path);

/// Fine-tunes every parameter of `pretrained` on the target observations.
NetworkParams finetune_transfer(const NetworkParams& pretrained, const Dataset& target,
                                const MultiResolutionBasis& basis, const ExperimentConfig& cfg,
                                const RandomState& replicate_state);

struct ReplicateResult {
  std::vector<MseRow> rows;  // transfer, target_only, kriging
  bool kriging_fallback = false;
};

/// One replicate at one target size. All three methods are scored against
/// the noiseless signal at the same test locations. Throws
/// ArchitectureMismatch if the pretrained input width differs from the basis.
ReplicateResult run_replicate(Process process, std::size_t target_n, const NetworkParams& pretrained,
                              const ReplicateData& data, const MultiResolutionBasis& basis,
                              const ExperimentConfig& cfg, const RandomState& replicate_state,
                              std::size_t replicate_index);

struct BenchmarkOptions {
  bool write_outputs = true;
  std::function<void(std::string_view)> log;
};

struct BenchmarkResult {
  MseReport report;
  std::map<Process, PretrainResult> pretrained;  // empty with per-replicate pretraining
};

/// Runs every process: one pretraining, then the replicate x size grid on
/// cfg.threads workers. Rows are merged in (process, n, replicate, method)
/// order, so the output does not depend on scheduling. With write_outputs the
/// output directory receives mse.csv, mse.svg, summary.txt and, per process,
/// pretrained.sntl and pretrain_trace.csv.
BenchmarkResult run_benchmark(const ExperimentConfig& cfg, const BenchmarkOptions& options = {});

/// Aggregate table, paired win rates and failure notes.
std::string summary_text(const MseReport& report);

/// Appends one JSON line (command, config hash, master seed, version).
void append_manifest(const std::filesystem::path& dir, std::string_view command, const ExperimentConfig& cfg);

inline constexpr std::string_view kVersion = "1.0.0";

}  // namespace sntl
