#include "follownet/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "follownet/errors.hpp"

namespace follownet {
namespace {

using Json = nlohmann::ordered_json;

Json architecture_to_json(const ArchitectureConfig& a) {
  Json j;
  j["image_height"] = a.image_height;
  j["image_width"] = a.image_width;
  j["image_channels"] = a.image_channels;
  j["semantic_channels"] = a.semantic_channels;
  j["semantic_kernels"] = a.semantic_kernels;
  j["semantic_strides"] = a.semantic_strides;
  j["depth_channels"] = a.depth_channels;
  j["depth_kernels"] = a.depth_kernels;
  j["depth_strides"] = a.depth_strides;
  j["embedding_dim"] = a.embedding_dim;
  j["gru_dim"] = a.gru_dim;
  j["semantic_dim"] = a.semantic_dim;
  j["depth_dim"] = a.depth_dim;
  j["attention_hidden"] = a.attention_hidden;
  j["q_hiddens"] = a.q_hiddens;
  j["num_actions"] = a.num_actions;
  j["vocab_size"] = a.vocab_size;
  j["max_tokens"] = a.max_tokens;
  return j;
}

Json training_to_json(const TrainingConfig& t) {
  Json j;
  j["learning_rate"] = t.learning_rate;
  j["momentum"] = t.momentum;
  j["discount"] = t.discount;
  j["total_env_steps"] = t.total_env_steps;
  j["replay_capacity"] = t.replay_capacity;
  j["batch_size"] = t.batch_size;
  j["epsilon_start"] = t.epsilon_start;
  j["epsilon_end"] = t.epsilon_end;
  j["epsilon_fraction"] = t.epsilon_fraction;
  j["target_sync_every"] = t.target_sync_every;
  j["updates_per_env_step"] = t.updates_per_env_step;
  j["warmup_steps"] = t.warmup_steps;
  j["max_episode_steps"] = t.max_episode_steps;
  j["eval_every"] = t.eval_every;
  j["eval_episodes"] = t.eval_episodes;
  j["early_stop_success"] = t.early_stop_success;
  j["clip_targets"] = t.clip_targets;
  return j;
}

// Reads `key` into `out` when present, enforcing the JSON type matches.
template <typename T>
void read_field(const Json& j, const char* key, T& out, const char* where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    out = it->get<T>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string(where) + "." + key + ": " + e.what());
  }
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const char* where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError(std::string("unknown key '") + it.key() + "' in " + where);
    }
  }
}

ArchitectureConfig architecture_from_json(const Json& j) {
  ArchitectureConfig a;
  check_keys(j,
             {"image_height", "image_width", "image_channels", "semantic_channels",
              "semantic_kernels", "semantic_strides", "depth_channels", "depth_kernels",
              "depth_strides", "embedding_dim", "gru_dim", "semantic_dim", "depth_dim",
              "attention_hidden", "q_hiddens", "num_actions", "vocab_size", "max_tokens"},
             "architecture");
  read_field(j, "image_height", a.image_height, "architecture");
  read_field(j, "image_width", a.image_width, "architecture");
  read_field(j, "image_channels", a.image_channels, "architecture");
  read_field(j, "semantic_channels", a.semantic_channels, "architecture");
  read_field(j, "semantic_kernels", a.semantic_kernels, "architecture");
  read_field(j, "semantic_strides", a.semantic_strides, "architecture");
  read_field(j, "depth_channels", a.depth_channels, "architecture");
  read_field(j, "depth_kernels", a.depth_kernels, "architecture");
  read_field(j, "depth_strides", a.depth_strides, "architecture");
  read_field(j, "embedding_dim", a.embedding_dim, "architecture");
  read_field(j, "gru_dim", a.gru_dim, "architecture");
  read_field(j, "semantic_dim", a.semantic_dim, "architecture");
  read_field(j, "depth_dim", a.depth_dim, "architecture");
  read_field(j, "attention_hidden", a.attention_hidden, "architecture");
  read_field(j, "q_hiddens", a.q_hiddens, "architecture");
  read_field(j, "num_actions", a.num_actions, "architecture");
  read_field(j, "vocab_size", a.vocab_size, "architecture");
  read_field(j, "max_tokens", a.max_tokens, "architecture");
  return a;
}

TrainingConfig training_from_json(const Json& j) {
  TrainingConfig t;
  check_keys(j,
             {"learning_rate", "momentum", "discount", "total_env_steps", "replay_capacity",
              "batch_size", "epsilon_start", "epsilon_end", "epsilon_fraction",
              "target_sync_every", "updates_per_env_step", "warmup_steps", "max_episode_steps",
              "eval_every", "eval_episodes", "early_stop_success", "clip_targets"},
             "training");
  read_field(j, "learning_rate", t.learning_rate, "training");
  read_field(j, "momentum", t.momentum, "training");
  read_field(j, "discount", t.discount, "training");
  read_field(j, "total_env_steps", t.total_env_steps, "training");
  read_field(j, "replay_capacity", t.replay_capacity, "training");
  read_field(j, "batch_size", t.batch_size, "training");
  read_field(j, "epsilon_start", t.epsilon_start, "training");
  read_field(j, "epsilon_end", t.epsilon_end, "training");
  read_field(j, "epsilon_fraction", t.epsilon_fraction, "training");
  read_field(j, "target_sync_every", t.target_sync_every, "training");
  read_field(j, "updates_per_env_step", t.updates_per_env_step, "training");
  read_field(j, "warmup_steps", t.warmup_steps, "training");
  read_field(j, "max_episode_steps", t.max_episode_steps, "training");
  read_field(j, "eval_every", t.eval_every, "training");
  read_field(j, "eval_episodes", t.eval_episodes, "training");
  read_field(j, "early_stop_success", t.early_stop_success, "training");
  read_field(j, "clip_targets", t.clip_targets, "training");
  return t;
}

}  // namespace

std::string experiment_config_to_json(const ExperimentConfig& config) {
  Json j;
  j["seed"] = config.seed;
  j["out_dir"] = config.out_dir;
  j["attention"] = config.attention;
  j["houses"] = config.houses;
  j["dataset"] = config.dataset;
  j["architecture"] = architecture_to_json(config.architecture);
  j["training"] = training_to_json(config.training);
  return j.dump(2) + "\n";
}

void save_experiment_config(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << experiment_config_to_json(config);
  if (!out.flush()) throw IoError("failed writing '" + path + "'");
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();

  Json j;
  try {
    j = Json::parse(buf.str());
  } catch (const Json::exception& e) {
    throw ParseError(std::string("config '") + path + "': " + e.what());
  }
  if (!j.is_object()) throw ParseError("config '" + path + "': top level must be an object");
  check_keys(j, {"seed", "out_dir", "attention", "houses", "dataset", "architecture", "training"},
             "config");

  ExperimentConfig config;
  read_field(j, "seed", config.seed, "config");
  read_field(j, "out_dir", config.out_dir, "config");
  read_field(j, "attention", config.attention, "config");
  read_field(j, "houses", config.houses, "config");
  read_field(j, "dataset", config.dataset, "config");
  if (auto it = j.find("architecture"); it != j.end()) {
    if (!it->is_object()) throw ParseError("config.architecture must be an object");
    config.architecture = architecture_from_json(*it);
  }
  if (auto it = j.find("training"); it != j.end()) {
    if (!it->is_object()) throw ParseError("config.training must be an object");
    config.training = training_from_json(*it);
  }
  config.architecture.use_attention = config.attention;

  if (config.houses.empty()) throw ConfigError("config '" + path + "' lists no houses");
  if (config.dataset.empty()) throw ConfigError("config '" + path + "' names no dataset");

  // Resolve paths relative to the config file and demand they exist now, so
  // a broken config fails at load time instead of minutes into a run.
  namespace fs = std::filesystem;
  const fs::path base = fs::absolute(fs::path(path)).parent_path();
  auto resolve = [&](const std::string& p) {
    fs::path fp(p);
    if (!fp.is_absolute()) fp = base / fp;
    return fp.lexically_normal().string();
  };
  config.out_dir = resolve(config.out_dir);
  for (std::string& hp : config.houses) {
    hp = resolve(hp);
    if (!fs::exists(hp)) throw ConfigError("house file '" + hp + "' does not exist");
  }
  config.dataset = resolve(config.dataset);
  if (!fs::exists(config.dataset)) {
    throw ConfigError("dataset file '" + config.dataset + "' does not exist");
  }
  return config;
}

std::map<std::string, HouseMap> load_experiment_houses(const ExperimentConfig& config) {
  std::map<std::string, HouseMap> houses;
  for (const std::string& path : config.houses) {
    HouseMap h = load_house_file(path);
    const std::string name = h.name;
    if (!houses.emplace(name, std::move(h)).second) {
      throw ConfigError("two house files share the name '" + name + "'");
    }
  }
  return houses;
}

InstructionDataset load_experiment_dataset(const ExperimentConfig& config,
                                           const std::map<std::string, HouseMap>& houses) {
  return load_dataset(config.dataset, houses);
}

void resolve_architecture(ExperimentConfig& config, const InstructionDataset& ds,
                          const std::map<std::string, HouseMap>& houses) {
  if (config.architecture.vocab_size == 0) {
    config.architecture.vocab_size = ds.vocab.size();
  }
  if (config.architecture.image_channels == 0) {
    if (houses.empty()) throw ConfigError("cannot derive image_channels without houses");
    config.architecture.image_channels =
        static_cast<int>(houses.begin()->second.class_names.size());
  }
  config.architecture.use_attention = config.attention;
}

}  // namespace follownet
