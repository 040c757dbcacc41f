#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "aomd/model.hpp"
#include "aomd/synthetic.hpp"
#include "aomd/training.hpp"

namespace aomd {

// Every tunable of a run, addressable by dotted key ("optim.learning_rate",
// "cluster.pad_factor", ...). Sections: data, model, cluster, train, optim,
// synthetic, ablation.
struct RunConfig {
  LoadOptions data;
  ModelConfig model;  // "cluster" keys address model.cluster
  TrainConfig train;  // "optim" keys address train.optim
  SyntheticSpec synthetic;
  AblationConfig ablation;
};

// All dotted keys in a fixed order.
std::vector<std::string> config_keys();

// Merges a JSON object of sections into `config`. Throws ConfigError on an
// unknown section or key, or a value of the wrong type.
void apply_json(RunConfig& config, std::string_view json_text);
// Sets one dotted key from its text form; the value is read as JSON when it
// parses as JSON and as a plain string otherwise. Lists may also be given
// comma-separated.
void set_value(RunConfig& config, std::string_view key, std::string_view value);
// Applies "key=value".
void apply_override(RunConfig& config, std::string_view assignment);

std::string to_json(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);
void write_run_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace aomd
