#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "follownet/dataset.hpp"
#include "follownet/house_map.hpp"
#include "follownet/metrics.hpp"
#include "follownet/model.hpp"
#include "follownet/optim.hpp"
#include "follownet/replay.hpp"

namespace follownet {

// Q-learning hyperparameters. Defaults are the desk-scale recipe: the
// published learning rate and discount, 300k environment steps, linear
// exploration decay over the first tenth of training, and one gradient
// update per environment step after a warmup.
struct TrainingConfig {
  double learning_rate = 1.70974e-4;
  double momentum = 0.0;
  double discount = 0.990022;
  long long total_env_steps = 300000;
  int replay_capacity = 50000;
  int batch_size = 32;
  double epsilon_start = 1.0;
  double epsilon_end = 0.1;
  double epsilon_fraction = 0.10;   // share of total steps spent decaying
  long long target_sync_every = 2000;  // counted in gradient updates
  int updates_per_env_step = 1;
  long long warmup_steps = 1000;    // env steps before updates begin
  int max_episode_steps = 100;
  long long eval_every = 10000;     // env steps between evaluations
  int eval_episodes = 100;
  double early_stop_success = -1.0;  // stop once eval full-success reaches this; off when < 0
  bool clip_targets = false;         // cap Bellman targets at the max achievable return
  std::uint64_t rng_seed = 0;

  bool operator==(const TrainingConfig&) const = default;
};

void validate_training_config(const TrainingConfig& config);

// Linear decay from epsilon_start to epsilon_end over the first
// epsilon_fraction of total_env_steps, constant afterwards.
double epsilon_at(long long step, const TrainingConfig& config);

// y_j = r_j for terminal transitions, else r_j + discount * max_a
// Q_target(next_obs_j, a); each assembled target is capped at max_target.
// Returns a constant (no-grad) vector of one target per transition.
TensorPtr bellman_targets(const std::vector<Transition>& batch, const FollowNetModel& target,
                          double discount,
                          double max_target = std::numeric_limits<double>::infinity());

// One gradient step on the mean squared Bellman error of the batch. Targets
// are held constant; gradients flow only through Q(obs, action). Returns the
// scalar loss.
double train_step(const std::vector<Transition>& batch, FollowNetModel& model,
                  const FollowNetModel& target, const TrainingConfig& config,
                  SgdOptimizer& optimizer,
                  double max_target = std::numeric_limits<double>::infinity());

// target <- bitwise copy of the online parameters; architectures must match.
void sync_target(const FollowNetModel& model, FollowNetModel& target);

struct TrainingLogRow {
  long long step = 0;
  double avg_return = 0.0;
  double full_success = 0.0;
  double partial_success = 0.0;
  double no_progress = 0.0;
  double epsilon = 0.0;
  double loss = 0.0;  // mean training loss since the previous row (0 if none)
};

struct TrainingLog {
  std::vector<TrainingLogRow> rows;
  std::string to_csv() const;
};

struct TrainingResult {
  FollowNetModel model;
  TrainingLog log;
};

// Full training loop: uniform instruction sampling over the train split,
// ε-greedy collection, replay, periodic target syncs, and a greedy evaluation
// sweep at step 0, every eval_every steps, and at the end. Evaluation uses the
// hold-out split when it is nonempty, otherwise the train split. When paths
// are given, the final model and the CSV log are written there (also on
// abort, capturing the last good state).
TrainingResult train(const InstructionDataset& dataset,
                     const std::map<std::string, HouseMap>& houses,
                     const ArchitectureConfig& arch, const TrainingConfig& config,
                     const std::string& checkpoint_path = "",
                     const std::string& log_path = "");

}  // namespace follownet
