// Command-line harness: world generation, instruction-dataset generation,
// training, evaluation, and single-episode playback.
//
// Every command is a pure function of its inputs, flags and seed; failures
// exit nonzero with a single machine-parsable line on stderr of the form
//   error:<category>: <message>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "follownet/checkpoint.hpp"
#include "follownet/dataset.hpp"
#include "follownet/env.hpp"
#include "follownet/errors.hpp"
#include "follownet/experiment.hpp"
#include "follownet/house_map.hpp"
#include "follownet/instr_gen.hpp"
#include "follownet/metrics.hpp"
#include "follownet/model.hpp"
#include "follownet/rng.hpp"
#include "follownet/taskgen.hpp"
#include "follownet/tensor.hpp"
#include "follownet/trainer.hpp"
#include "follownet/worldgen.hpp"

namespace fs = std::filesystem;
using namespace follownet;

namespace {

std::string fixed_decimal(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s + "]";
}

// Human-readable field-by-field diff between two architectures; empty when
// they match.
std::string architecture_diff(const ArchitectureConfig& want, const ArchitectureConfig& got) {
  std::string d;
  auto add = [&](const char* field, const std::string& a, const std::string& b) {
    if (a == b) return;
    if (!d.empty()) d += "; ";
    d += std::string(field) + ": config " + a + " vs checkpoint " + b;
  };
  auto num = [](auto v) { return std::to_string(v); };
  add("image_height", num(want.image_height), num(got.image_height));
  add("image_width", num(want.image_width), num(got.image_width));
  add("image_channels", num(want.image_channels), num(got.image_channels));
  add("semantic_channels", join_ints(want.semantic_channels), join_ints(got.semantic_channels));
  add("semantic_kernels", join_ints(want.semantic_kernels), join_ints(got.semantic_kernels));
  add("semantic_strides", join_ints(want.semantic_strides), join_ints(got.semantic_strides));
  add("depth_channels", join_ints(want.depth_channels), join_ints(got.depth_channels));
  add("depth_kernels", join_ints(want.depth_kernels), join_ints(got.depth_kernels));
  add("depth_strides", join_ints(want.depth_strides), join_ints(got.depth_strides));
  add("embedding_dim", num(want.embedding_dim), num(got.embedding_dim));
  add("gru_dim", num(want.gru_dim), num(got.gru_dim));
  add("semantic_dim", num(want.semantic_dim), num(got.semantic_dim));
  add("depth_dim", num(want.depth_dim), num(got.depth_dim));
  add("attention_hidden", num(want.attention_hidden), num(got.attention_hidden));
  add("q_hiddens", join_ints(want.q_hiddens), join_ints(got.q_hiddens));
  add("num_actions", num(want.num_actions), num(got.num_actions));
  add("vocab_size", num(want.vocab_size), num(got.vocab_size));
  add("max_tokens", num(want.max_tokens), num(got.max_tokens));
  add("use_attention", want.use_attention ? "true" : "false",
      got.use_attention ? "true" : "false");
  return d;
}

FollowNetModel load_checked_model(const std::string& checkpoint_path,
                                  const ArchitectureConfig& expected) {
  FollowNetModel model = load_checkpoint(checkpoint_path);
  const std::string diff = architecture_diff(expected, model.config());
  if (!diff.empty()) {
    throw ConfigError("checkpoint '" + checkpoint_path +
                      "' does not match the configured architecture: " + diff);
  }
  return model;
}

void write_pgm(const std::string& path, int width, int height,
               const std::vector<int>& levels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "P2\n" << width << " " << height << "\n255\n";
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x) out << " ";
      out << levels[static_cast<std::size_t>(y) * width + x];
    }
    out << "\n";
  }
  if (!out.flush()) throw IoError("failed writing '" + path + "'");
}

// Renders the semantic observation as a grayscale class map.
void write_observation_frame(const Observation& obs, const std::string& path) {
  const auto& shape = obs.semantic->shape;
  const int h = shape[0], w = shape[1], c = shape[2];
  std::vector<int> levels(static_cast<std::size_t>(h) * w, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int cls = 0;
      double best = -1.0;
      for (int k = 0; k < c; ++k) {
        const double v = obs.semantic->values[(static_cast<std::size_t>(y) * w + x) * c + k];
        if (v > best) {
          best = v;
          cls = k;
        }
      }
      levels[static_cast<std::size_t>(y) * w + x] = c > 1 ? cls * 255 / (c - 1) : 0;
    }
  }
  write_pgm(path, w, h, levels);
}

const char* heading_name(Heading h) {
  switch (h) {
    case Heading::kPlusX: return "+x";
    case Heading::kPlusY: return "+y";
    case Heading::kMinusX: return "-x";
    case Heading::kMinusY: return "-y";
  }
  return "?";
}

const char* action_name(Action a) {
  switch (a) {
    case Action::kTurnLeft: return "turn_left";
    case Action::kForward: return "forward";
    case Action::kTurnRight: return "turn_right";
  }
  return "?";
}

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  bool out_set = false;
};

ExperimentConfig load_config_with_overrides(const CommonFlags& flags) {
  ExperimentConfig cfg = load_experiment_config(flags.config_path);
  if (flags.seed_set) cfg.seed = flags.seed;
  if (flags.out_set) cfg.out_dir = flags.out;
  cfg.training.rng_seed = cfg.seed;
  return cfg;
}

SimParams sim_params_for(const ExperimentConfig& cfg) {
  SimParams params;
  params.render.h_img = cfg.architecture.image_height;
  params.render.w_img = cfg.architecture.image_width;
  params.max_episode_steps = cfg.training.max_episode_steps;
  return params;
}

int count_regions_with_prefix(const HouseMap& h, const char* prefix) {
  int n = 0;
  for (const Region& r : h.regions) {
    if (r.name.rfind(prefix, 0) == 0) ++n;
  }
  return n;
}

void cmd_gen_world(const WorldGenParams& params, std::uint64_t seed, const std::string& out) {
  const HouseMap house = generate_house(params, seed);
  if (const fs::path dir = fs::path(out).parent_path(); !dir.empty()) {
    fs::create_directories(dir);
  }
  save_house_file(house, out);
  std::cout << "wrote " << out << ": house '" << house.name << "' " << house.width << "x"
            << house.height << ", " << count_regions_with_prefix(house, "room_") << " rooms, "
            << count_regions_with_prefix(house, "door_") << " doors, "
            << count_regions_with_prefix(house, "by_") << " objects\n";
}

void cmd_gen_instr(const std::vector<std::string>& house_paths, const DatasetGenParams& params,
                   std::uint64_t seed, const std::string& out) {
  std::vector<HouseMap> houses;
  houses.reserve(house_paths.size());
  for (const std::string& p : house_paths) houses.push_back(load_house_file(p));
  const InstructionDataset ds = generate_dataset(houses, params, seed);
  if (const fs::path dir = fs::path(out).parent_path(); !dir.empty()) {
    fs::create_directories(dir);
  }
  save_dataset(ds, out);
  int train = 0, holdout = 0;
  for (const Instruction& ins : ds.instructions) {
    (ins.split_tag == SplitTag::kTrain ? train : holdout) += 1;
  }
  std::cout << "wrote " << out << ": " << ds.instructions.size() << " instructions (" << train
            << " train, " << holdout << " holdout), vocab " << ds.vocab.size() << ", "
            << ds.houses.size() << " houses\n";
}

void cmd_train(const CommonFlags& flags, bool no_attention, long long total_steps_override) {
  ExperimentConfig cfg = load_config_with_overrides(flags);
  if (no_attention) cfg.attention = false;
  if (total_steps_override >= 0) cfg.training.total_env_steps = total_steps_override;
  const auto houses = load_experiment_houses(cfg);
  const InstructionDataset ds = load_experiment_dataset(cfg, houses);
  resolve_architecture(cfg, ds, houses);

  fs::create_directories(cfg.out_dir);
  const std::string checkpoint_path = (fs::path(cfg.out_dir) / "checkpoint.bin").string();
  const std::string log_path = (fs::path(cfg.out_dir) / "training_log.csv").string();
  save_experiment_config(cfg, (fs::path(cfg.out_dir) / "experiment.json").string());

  const TrainingResult result =
      train(ds, houses, cfg.architecture, cfg.training, checkpoint_path, log_path);
  std::cout << "trained " << cfg.training.total_env_steps << " env steps ("
            << (cfg.attention ? "attention" : "baseline") << ", "
            << result.model.params().total_parameters() << " parameters)\n";
  if (!result.log.rows.empty()) {
    const TrainingLogRow& last = result.log.rows.back();
    std::cout << "final eval @ step " << last.step << ": avg_return "
              << fixed_decimal(last.avg_return, 4) << ", full " << fixed_decimal(last.full_success, 4)
              << ", partial " << fixed_decimal(last.partial_success, 4) << ", none "
              << fixed_decimal(last.no_progress, 4) << "\n";
  }
  std::cout << "wrote " << checkpoint_path << "\n";
  std::cout << "wrote " << log_path << "\n";
}

SplitTag pick_eval_split(const std::string& split_flag, const InstructionDataset& ds) {
  if (split_flag == "train") return SplitTag::kTrain;
  if (split_flag == "holdout") return SplitTag::kHoldout;
  if (split_flag != "auto") {
    throw ConfigError("split must be auto, train or holdout, got '" + split_flag + "'");
  }
  for (const Instruction& ins : ds.instructions) {
    if (ins.split_tag == SplitTag::kHoldout) return SplitTag::kHoldout;
  }
  return SplitTag::kTrain;
}

void cmd_eval(const CommonFlags& flags, const std::string& checkpoint_path, int episodes,
              const std::string& split_flag) {
  ExperimentConfig cfg = load_config_with_overrides(flags);
  const auto houses = load_experiment_houses(cfg);
  const InstructionDataset ds = load_experiment_dataset(cfg, houses);
  resolve_architecture(cfg, ds, houses);
  const FollowNetModel model = load_checked_model(checkpoint_path, cfg.architecture);

  const SplitTag split = pick_eval_split(split_flag, ds);
  const std::string out_dir = flags.out_set ? flags.out
                                            : (fs::path(cfg.out_dir) / "eval").string();
  const EvalSummary summary = evaluate_policy(model, houses, ds, split, episodes,
                                              derive_seed(cfg.seed, "eval"), sim_params_for(cfg));
  write_report_bundle(summary.reports, ds, out_dir);
  std::cout << "evaluated " << summary.episodes << " episodes on the "
            << (split == SplitTag::kTrain ? "train" : "holdout") << " split\n";
  std::cout << "avg_return " << fixed_decimal(summary.avg_return, 4) << ", full "
            << fixed_decimal(summary.full_fraction, 4) << ", partial "
            << fixed_decimal(summary.partial_fraction, 4) << ", none "
            << fixed_decimal(summary.none_fraction, 4) << "\n";
  std::cout << "wrote " << out_dir << "\n";
}

void cmd_play(const CommonFlags& flags, const std::string& checkpoint_path, int instruction_index,
              int max_steps_override) {
  ExperimentConfig cfg = load_config_with_overrides(flags);
  const auto houses = load_experiment_houses(cfg);
  const InstructionDataset ds = load_experiment_dataset(cfg, houses);
  resolve_architecture(cfg, ds, houses);
  const FollowNetModel model = load_checked_model(checkpoint_path, cfg.architecture);

  if (instruction_index < 0 || instruction_index >= static_cast<int>(ds.instructions.size())) {
    throw ConfigError("instruction index " + std::to_string(instruction_index) +
                      " outside dataset of " + std::to_string(ds.instructions.size()));
  }
  const Instruction& instruction = ds.instructions[static_cast<std::size_t>(instruction_index)];
  const auto house_it = houses.find(instruction.house_name);
  if (house_it == houses.end()) {
    throw ValidationError("instruction references unknown house '" + instruction.house_name +
                          "'");
  }
  SimParams params = sim_params_for(cfg);
  if (max_steps_override > 0) params.max_episode_steps = max_steps_override;

  const std::string out_dir = flags.out_set ? flags.out
                                            : (fs::path(cfg.out_dir) / "play").string();
  const fs::path frames_dir = fs::path(out_dir) / "frames";
  fs::create_directories(frames_dir);

  NoGradGuard guard;
  auto [state, obs] = reset_episode(house_it->second, instruction,
                                    derive_seed(cfg.seed, "play"), params);
  auto frame_path = [&](int t) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%03d.pgm", t);
    return (frames_dir / name).string();
  };
  write_observation_frame(obs, frame_path(0));

  std::vector<Pose> poses = {state.pose};
  std::vector<Action> actions;
  std::vector<double> rewards;
  std::vector<std::vector<double>> attention;
  if (model.config().use_attention) {
    attention.resize(instruction.tokens.size());
  }
  double total_return = 0.0;
  while (!state.done && state.steps_taken < params.max_episode_steps) {
    const auto [q, trace] = model.q_values(obs);
    for (std::size_t i = 0; i < attention.size(); ++i) {
      attention[i].push_back(trace.alpha->values[i]);
    }
    const Action action = static_cast<Action>(greedy_action(q));
    const StepResult sr = step(house_it->second, state, instruction, action, params);
    obs = sr.observation;
    actions.push_back(action);
    rewards.push_back(sr.reward);
    total_return += sr.reward;
    poses.push_back(state.pose);
    write_observation_frame(obs, frame_path(static_cast<int>(actions.size())));
  }

  std::ofstream traj((fs::path(out_dir) / "trajectory.csv").string(), std::ios::binary);
  if (!traj) throw IoError("cannot open trajectory.csv for writing");
  traj << "step,x,y,heading,action,reward\n";
  for (std::size_t t = 0; t < poses.size(); ++t) {
    traj << t << "," << poses[t].x << "," << poses[t].y << "," << heading_name(poses[t].heading)
         << ",";
    if (t < actions.size()) {
      traj << action_name(actions[t]) << "," << fixed_decimal(rewards[t], 6);
    } else {
      traj << ",";
    }
    traj << "\n";
  }
  if (!traj.flush()) throw IoError("failed writing trajectory.csv");

  if (!attention.empty()) {
    EpisodeReport report;
    report.tokens = instruction.tokens;
    report.attention = attention;
    export_attention_heatmap(report, ds.vocab, (fs::path(out_dir) / "attention.csv").string(),
                             (fs::path(out_dir) / "attention.pgm").string());
  }

  const std::size_t reached = state.visited_waypoints.size();
  std::set<std::string> distinct(instruction.waypoints.begin(), instruction.waypoints.end());
  std::cout << "instruction " << instruction_index << ": \"" << instruction.text << "\"\n";
  std::cout << "steps " << actions.size() << ", return " << fixed_decimal(total_return, 4)
            << ", waypoints " << reached << "/" << distinct.size() << "\n";
  std::cout << "wrote " << out_dir << " (" << poses.size() << " frames)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instruction-following navigation in procedurally generated houses"};
  app.require_subcommand(1);

  CommonFlags flags;

  // --- gen-world ---------------------------------------------------------
  WorldGenParams world_params;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "house.txt";
  CLI::App* gen_world = app.add_subcommand("gen-world", "Generate a procedural house file");
  gen_world->add_option("--width", world_params.width, "House width in cells")
      ->capture_default_str();
  gen_world->add_option("--height", world_params.height, "House height in cells")
      ->capture_default_str();
  gen_world->add_option("--seed", gen_seed, "Generation seed")->capture_default_str();
  gen_world->add_option("--out", gen_out, "Output house file")->capture_default_str();
  gen_world->add_option("--name", world_params.name, "House name (default gen<seed>)");
  gen_world->add_option("--min-objects", world_params.min_objects, "Minimum landmark objects")
      ->capture_default_str();
  gen_world->add_option("--max-objects", world_params.max_objects, "Maximum landmark objects")
      ->capture_default_str();
  gen_world->add_option("--min-room-span", world_params.min_room_span,
                        "Narrowest interior side of a room")
      ->capture_default_str();

  // --- gen-instr ---------------------------------------------------------
  std::vector<std::string> instr_houses;
  DatasetGenParams instr_params;
  std::uint64_t instr_seed = 0;
  std::string instr_out = "dataset.jsonl";
  CLI::App* gen_instr =
      app.add_subcommand("gen-instr", "Sample an instruction dataset from houses");
  gen_instr->add_option("--house", instr_houses, "House file (repeatable)")
      ->required()
      ->expected(-1);
  gen_instr->add_option("--tasks", instr_params.tasks, "Distinct (start, goal) tasks")
      ->capture_default_str();
  gen_instr->add_option("--per-task", instr_params.per_task, "Phrasings per task")
      ->capture_default_str();
  gen_instr
      ->add_option("--max-waypoints", instr_params.max_waypoints,
                   "Waypoint cap per instruction (1..5)")
      ->capture_default_str();
  gen_instr
      ->add_option("--holdout-fraction", instr_params.holdout_fraction,
                   "Hold-out fraction for --split auto")
      ->capture_default_str();
  gen_instr->add_option("--split", instr_params.split, "auto, train or holdout")
      ->capture_default_str();
  gen_instr->add_option("--seed", instr_seed, "Sampling seed")->capture_default_str();
  gen_instr->add_option("--out", instr_out, "Output dataset file")->capture_default_str();

  // --- train -------------------------------------------------------------
  bool no_attention = false;
  long long total_steps_override = -1;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model from an experiment config");
  train_cmd->add_option("--config", flags.config_path, "Experiment config JSON")->required();
  CLI::Option* train_seed = train_cmd->add_option("--seed", flags.seed, "Override config seed");
  CLI::Option* train_out =
      train_cmd->add_option("--out", flags.out, "Override config output directory");
  train_cmd->add_flag("--no-attention", no_attention,
                      "Replace attention pooling with the final-GRU-state baseline");
  train_cmd->add_option("--total-steps", total_steps_override,
                        "Override training.total_env_steps");

  // --- eval --------------------------------------------------------------
  std::string eval_checkpoint;
  int eval_episodes = 100;
  std::string eval_split = "auto";
  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint and write reports");
  eval_cmd->add_option("--config", flags.config_path, "Experiment config JSON")->required();
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "Model checkpoint")->required();
  eval_cmd->add_option("--episodes", eval_episodes, "Evaluation episodes")
      ->capture_default_str();
  eval_cmd->add_option("--split", eval_split, "auto, train or holdout")->capture_default_str();
  CLI::Option* eval_seed = eval_cmd->add_option("--seed", flags.seed, "Override config seed");
  CLI::Option* eval_out =
      eval_cmd->add_option("--out", flags.out, "Report directory (default <out_dir>/eval)");

  // --- play --------------------------------------------------------------
  std::string play_checkpoint;
  int play_instruction = 0;
  int play_max_steps = 0;
  CLI::App* play_cmd =
      app.add_subcommand("play", "Run one greedy episode and dump frames and traces");
  play_cmd->add_option("--config", flags.config_path, "Experiment config JSON")->required();
  play_cmd->add_option("--checkpoint", play_checkpoint, "Model checkpoint")->required();
  play_cmd->add_option("--instruction", play_instruction, "Instruction index in the dataset")
      ->capture_default_str();
  play_cmd->add_option("--max-steps", play_max_steps,
                       "Episode step cap (default training.max_episode_steps)");
  CLI::Option* play_seed = play_cmd->add_option("--seed", flags.seed, "Override config seed");
  CLI::Option* play_out =
      play_cmd->add_option("--out", flags.out, "Output directory (default <out_dir>/play)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error:usage: " << e.what() << "\n";
    return 2;
  }

  try {
    if (gen_world->parsed()) {
      cmd_gen_world(world_params, gen_seed, gen_out);
    } else if (gen_instr->parsed()) {
      cmd_gen_instr(instr_houses, instr_params, instr_seed, instr_out);
    } else if (train_cmd->parsed()) {
      flags.seed_set = train_seed->count() > 0;
      flags.out_set = train_out->count() > 0;
      cmd_train(flags, no_attention, total_steps_override);
    } else if (eval_cmd->parsed()) {
      flags.seed_set = eval_seed->count() > 0;
      flags.out_set = eval_out->count() > 0;
      cmd_eval(flags, eval_checkpoint, eval_episodes, eval_split);
    } else if (play_cmd->parsed()) {
      flags.seed_set = play_seed->count() > 0;
      flags.out_set = play_out->count() > 0;
      cmd_play(flags, play_checkpoint, play_instruction, play_max_steps);
    }
  } catch (const Error& e) {
    std::cerr << "error:" << e.category() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error:internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
