#include "sntl/experiment/config.hpp"

#include "sntl/error.hpp"
#include "sntl/net/weights_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace sntl {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (processes.empty()) throw ConfigError("config: at least one process is required");
  if (target_sizes.empty()) throw ConfigError("config: at least one target size is required");
  for (std::size_t n : target_sizes) {
    if (n == 0) throw ConfigError("config: target sizes must be positive");
  }
  if (replicates == 0) throw ConfigError("config: replicates must be at least 1");
  if (basis.empty()) throw ConfigError("config: basis needs at least one level");
  for (const auto& level : basis) {
    if (level.rows == 0 || level.cols == 0 || !(level.theta > 0.0)) {
      throw ConfigError("config: basis levels need positive rows, cols and theta");
    }
  }
  if (simulation.source_side < 2) throw ConfigError("config: simulation.source_side must be at least 2");
  if (simulation.test_size == 0) throw ConfigError("config: simulation.test_size must be positive");
  if (!(simulation.target_jitter >= 0.0 && simulation.target_jitter < 0.5)) {
    throw ConfigError("config: simulation.target_jitter must lie in [0, 0.5)");
  }
  if (!(simulation.nonstationary_nugget >= 0.0)) {
    throw ConfigError("config: simulation.nonstationary_nugget must be non-negative");
  }
  try {
    simulation.matern.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  pretrain.validate();
  finetune.validate();
  target_only.validate();
}

namespace {

template <typename T>
void read_if(const json& obj, const char* key, T& into) {
  if (obj.contains(key)) into = obj.at(key).get<T>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError("config: unknown key '" + where + key + "'");
  }
}

TrainConfig parse_train(const json& obj, TrainConfig cfg, const std::string& where) {
  reject_unknown(obj, {"epochs", "learning_rate", "batch_size", "validation_fraction", "beta1", "beta2", "epsilon"},
                 where + ".");
  read_if(obj, "epochs", cfg.epochs);
  read_if(obj, "learning_rate", cfg.learning_rate);
  read_if(obj, "batch_size", cfg.batch_size);
  read_if(obj, "validation_fraction", cfg.validation_fraction);
  read_if(obj, "beta1", cfg.beta1);
  read_if(obj, "beta2", cfg.beta2);
  read_if(obj, "epsilon", cfg.epsilon);
  return cfg;
}

json train_to_json(const TrainConfig& cfg) {
  return {{"epochs", cfg.epochs},           {"learning_rate", cfg.learning_rate},
          {"batch_size", cfg.batch_size},   {"validation_fraction", cfg.validation_fraction},
          {"beta1", cfg.beta1},             {"beta2", cfg.beta2},
          {"epsilon", cfg.epsilon}};
}

std::vector<LevelSpec> parse_basis(const json& obj) {
  reject_unknown(obj, {"levels", "scale_by_spacing", "support_multiplier"}, "basis.");
  bool scale = true;
  double multiplier = 2.5;
  read_if(obj, "scale_by_spacing", scale);
  read_if(obj, "support_multiplier", multiplier);
  if (!obj.contains("levels")) return default_level_spec(scale, multiplier);
  std::vector<LevelSpec> levels;
  for (const auto& item : obj.at("levels")) {
    reject_unknown(item, {"rows", "cols", "theta"}, "basis.levels[].");
    LevelSpec level;
    level.rows = item.at("rows").get<std::size_t>();
    level.cols = item.at("cols").get<std::size_t>();
    if (item.contains("theta")) {
      level.theta = item.at("theta").get<double>();
    } else {
      level.theta = scale ? multiplier * std::max(grid_spacing(level.rows), grid_spacing(level.cols)) : 1.0;
    }
    levels.push_back(level);
  }
  return levels;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  ExperimentConfig cfg;
  try {
    const json root = json::parse(json_text);
    reject_unknown(root,
                   {"processes", "target_sizes", "replicates", "seed", "threads", "output_dir", "basis",
                    "simulation", "pretrain", "finetune", "target_only", "kriging", "pretrain_per_replicate"},
                   "");
    if (root.contains("processes")) {
      cfg.processes.clear();
      for (const auto& p : root.at("processes")) cfg.processes.push_back(parse_process(p.get<std::string>()));
    }
    read_if(root, "target_sizes", cfg.target_sizes);
    read_if(root, "replicates", cfg.replicates);
    read_if(root, "seed", cfg.seed);
    read_if(root, "threads", cfg.threads);
    if (root.contains("output_dir")) cfg.output_dir = root.at("output_dir").get<std::string>();
    if (root.contains("basis")) cfg.basis = parse_basis(root.at("basis"));
    if (root.contains("simulation")) {
      const json& sim = root.at("simulation");
      reject_unknown(sim, {"source_side", "test_size", "target_jitter", "nonstationary_nugget", "matern"},
                     "simulation.");
      read_if(sim, "source_side", cfg.simulation.source_side);
      read_if(sim, "test_size", cfg.simulation.test_size);
      read_if(sim, "target_jitter", cfg.simulation.target_jitter);
      read_if(sim, "nonstationary_nugget", cfg.simulation.nonstationary_nugget);
      if (sim.contains("matern")) {
        const json& m = sim.at("matern");
        reject_unknown(m, {"sigma2", "nu", "rho", "tau2"}, "simulation.matern.");
        read_if(m, "sigma2", cfg.simulation.matern.sigma2);
        read_if(m, "nu", cfg.simulation.matern.nu);
        read_if(m, "rho", cfg.simulation.matern.rho);
        read_if(m, "tau2", cfg.simulation.matern.tau2);
      }
    }
    if (root.contains("pretrain")) cfg.pretrain = parse_train(root.at("pretrain"), cfg.pretrain, "pretrain");
    if (root.contains("finetune")) cfg.finetune = parse_train(root.at("finetune"), cfg.finetune, "finetune");
    if (root.contains("target_only")) {
      cfg.target_only = parse_train(root.at("target_only"), cfg.target_only, "target_only");
    }
    if (root.contains("kriging")) {
      const json& k = root.at("kriging");
      reject_unknown(k, {"params"}, "kriging.");
      const std::string mode = k.value("params", std::string("ml"));
      if (mode == "ml") {
        cfg.kriging_params = KrigingParamsMode::ml;
      } else if (mode == "true") {
        cfg.kriging_params = KrigingParamsMode::truth;
      } else {
        throw ConfigError("config: kriging.params must be \"ml\" or \"true\"");
      }
    }
    read_if(root, "pretrain_per_replicate", cfg.pretrain_per_replicate);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::stringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json processes = json::array();
  for (Process p : cfg.processes) processes.push_back(std::string(to_string(p)));
  json levels = json::array();
  for (const auto& l : cfg.basis) levels.push_back({{"rows", l.rows}, {"cols", l.cols}, {"theta", l.theta}});
  const json root = {
      {"processes", processes},
      {"target_sizes", cfg.target_sizes},
      {"replicates", cfg.replicates},
      {"seed", cfg.seed},
      {"threads", cfg.threads},
      {"output_dir", cfg.output_dir.string()},
      {"basis", {{"levels", levels}}},
      {"simulation",
       {{"source_side", cfg.simulation.source_side},
        {"test_size", cfg.simulation.test_size},
        {"target_jitter", cfg.simulation.target_jitter},
        {"nonstationary_nugget", cfg.simulation.nonstationary_nugget},
        {"matern",
         {{"sigma2", cfg.simulation.matern.sigma2},
          {"nu", cfg.simulation.matern.nu},
          {"rho", cfg.simulation.matern.rho},
          {"tau2", cfg.simulation.matern.tau2}}}}},
      {"pretrain", train_to_json(cfg.pretrain)},
      {"finetune", train_to_json(cfg.finetune)},
      {"target_only", train_to_json(cfg.target_only)},
      {"kriging", {{"params", cfg.kriging_params == KrigingParamsMode::ml ? "ml" : "true"}}},
      {"pretrain_per_replicate", cfg.pretrain_per_replicate},
  };
  return root.dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
  // Thread count and output location do not affect results.
  ExperimentConfig copy = cfg;
  copy.threads = 0;
  copy.output_dir.clear();
  const std::string text = config_to_json(copy);
  const auto crc = crc32(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", crc);
  return buf;
}

std::string_view config_schema_help() {
  return R"(Configuration file (JSON; every key optional, unknown keys rejected):
  processes              ["stationary", "nonstationary"]
  target_sizes           [25, 64, 100, 225]   perfect squares
  replicates             30
  seed                   master seed (unsigned 64-bit)
  threads                0 = one per hardware thread
  output_dir             "sntl-out"  (overridden by SNTL_OUTPUT_DIR, then --out-dir)
  basis.levels           [{rows, cols, theta?}, ...]  default 3x3, 5x5, 7x7, 7x8
  basis.scale_by_spacing true: theta = support_multiplier * knot spacing; false: theta = 1
  basis.support_multiplier 2.5
  simulation.source_side 70 (source grid side; 70 x 70 = 4900 points)
  simulation.test_size   2000 held-out uniform locations per replicate
  simulation.target_jitter 0.1 (uniform offset half-width in target grid spacings)
  simulation.nonstationary_nugget 1e-6
  simulation.matern      {sigma2: 1, nu: 1, rho: 0.2, tau2: 0.01}
  pretrain               {epochs: 1500, learning_rate: 0.001, batch_size: 64,
                          validation_fraction: 0.2, beta1: 0.9, beta2: 0.999, epsilon: 1e-8}
  finetune               same keys; epochs 1000, validation_fraction 0
  target_only            same keys; epochs 1000, validation_fraction 0
  kriging.params         "ml" (fit on target data) or "true" (generating parameters)
  pretrain_per_replicate false
)";
}

}  // namespace sntl
