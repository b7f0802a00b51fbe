#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "follownet/dataset.hpp"
#include "follownet/house_map.hpp"
#include "follownet/model.hpp"
#include "follownet/trainer.hpp"

namespace follownet {

// One experiment = houses + instruction dataset + architecture + training
// schedule + seed, serialized as a JSON document so a run is reproducible
// from a single file.
//
// Two architecture fields accept 0 as "derive from the data at load time":
// vocab_size (taken from the dataset vocabulary) and image_channels (taken
// from the first house's class table). Explicit nonzero values are kept and
// later validated against the data by the trainer.
// The top-level seed is the experiment's single seed: commands copy it into
// training.rng_seed and derive evaluation/playback streams from it, so the
// JSON form has no separate training seed field.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string out_dir = "run";
  bool attention = true;
  std::vector<std::string> houses;  // house file paths
  std::string dataset;              // dataset file path
  ArchitectureConfig architecture;
  TrainingConfig training;

  bool operator==(const ExperimentConfig&) const = default;
};

// Serializes with a fixed key order so identical configs yield identical
// bytes.
std::string experiment_config_to_json(const ExperimentConfig& config);
void save_experiment_config(const ExperimentConfig& config, const std::string& path);

// Parses and validates a config file. Relative house/dataset/out_dir paths
// are resolved against the directory containing the config file. Every
// referenced input file must exist (ConfigError otherwise); malformed JSON
// or wrong value types raise ParseError; unknown keys raise ConfigError.
ExperimentConfig load_experiment_config(const std::string& path);

// Loads every house file, keyed by the name embedded in the house text.
std::map<std::string, HouseMap> load_experiment_houses(const ExperimentConfig& config);

// Loads the dataset against the given houses and resolves the architecture's
// derive-from-data fields (vocab_size, image_channels) in place.
InstructionDataset load_experiment_dataset(const ExperimentConfig& config,
                                           const std::map<std::string, HouseMap>& houses);
void resolve_architecture(ExperimentConfig& config, const InstructionDataset& ds,
                          const std::map<std::string, HouseMap>& houses);

}  // namespace follownet
