#pragma once

#include "sntl/basis.hpp"
#include "sntl/net/train.hpp"
#include "sntl/surfaces.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sntl {

enum class KrigingParamsMode { ml, truth };

struct ExperimentConfig {
  std::vector<Process> processes{Process::stationary, Process::nonstationary};
  std::vector<std::size_t> target_sizes{25, 64, 100, 225};
  std::size_t replicates = 30;
  std::uint64_t seed = 20240501;
  std::size_t threads = 0;  // 0: one per hardware thread
  std::filesystem::path output_dir = "sntl-out";

  std::vector<LevelSpec> basis = default_level_spec();
  SimulationConfig simulation;
  TrainConfig pretrain{.epochs = 1500, .validation_fraction = 0.2};
  TrainConfig finetune{.epochs = 1000};
  TrainConfig target_only{.epochs = 1000};
  KrigingParamsMode kriging_params = KrigingParamsMode::ml;
  /// Draw a fresh source surface and pretrain once per replicate instead of
  /// once per process.
  bool pretrain_per_replicate = false;

  /// Throws ConfigError.
  void validate() const;
};

/// Parses a JSON document; absent keys keep their defaults, unknown keys are
/// rejected. Throws ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form (sorted keys, resolved basis radii); parse_config
/// reads it back to an equal configuration.
std::string config_to_json(const ExperimentConfig& cfg);
/// CRC-32 of the canonical JSON as eight hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Human-readable description of every key, printed by the CLI help.
std::string_view config_schema_help();

}  // namespace sntl
