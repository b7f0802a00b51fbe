#include "follownet/trainer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <utility>

#include "follownet/checkpoint.hpp"
#include "follownet/env.hpp"
#include "follownet/errors.hpp"
#include "follownet/ops.hpp"
#include "follownet/rng.hpp"

namespace follownet {

void validate_training_config(const TrainingConfig& c) {
  if (c.learning_rate <= 0.0) throw ConfigError("training: learning rate must be positive");
  if (c.momentum < 0.0 || c.momentum >= 1.0) {
    throw ConfigError("training: momentum must be in [0, 1)");
  }
  if (c.discount <= 0.0 || c.discount >= 1.0) {
    throw ConfigError("training: discount must be in (0, 1)");
  }
  if (c.total_env_steps < 0) throw ConfigError("training: total_env_steps must be >= 0");
  if (c.replay_capacity < 1) throw ConfigError("training: replay capacity must be positive");
  if (c.batch_size < 1) throw ConfigError("training: batch size must be positive");
  if (c.epsilon_start < 0.0 || c.epsilon_start > 1.0 || c.epsilon_end < 0.0 ||
      c.epsilon_end > 1.0) {
    throw ConfigError("training: epsilon endpoints must lie in [0, 1]");
  }
  if (c.epsilon_fraction < 0.0 || c.epsilon_fraction > 1.0) {
    throw ConfigError("training: epsilon_fraction must lie in [0, 1]");
  }
  if (c.target_sync_every < 1) throw ConfigError("training: target_sync_every must be positive");
  if (c.updates_per_env_step < 0) {
    throw ConfigError("training: updates_per_env_step must be >= 0");
  }
  if (c.warmup_steps < 0) throw ConfigError("training: warmup_steps must be >= 0");
  if (c.max_episode_steps < 1) {
    throw ConfigError("training: max_episode_steps must be positive");
  }
  if (c.eval_every < 1) throw ConfigError("training: eval_every must be positive");
  if (c.eval_episodes < 1) throw ConfigError("training: eval_episodes must be positive");
}

double epsilon_at(long long step, const TrainingConfig& config) {
  if (step < 0) throw ConfigError("epsilon_at: step must be >= 0");
  const double decay_steps =
      config.epsilon_fraction * static_cast<double>(config.total_env_steps);
  if (decay_steps <= 0.0 || static_cast<double>(step) >= decay_steps) {
    return config.epsilon_end;
  }
  const double t = static_cast<double>(step) / decay_steps;
  return config.epsilon_start + (config.epsilon_end - config.epsilon_start) * t;
}

TensorPtr bellman_targets(const std::vector<Transition>& batch, const FollowNetModel& target,
                          double discount, double max_target) {
  if (batch.empty()) throw NotReadyError("bellman_targets: empty batch");
  if (discount <= 0.0 || discount >= 1.0) {
    throw ConfigError("bellman_targets: discount must be in (0, 1)");
  }
  NoGradGuard frozen;
  std::vector<double> ys;
  ys.reserve(batch.size());
  for (const Transition& t : batch) {
    double y = t.reward;
    if (!t.done) {
      if (!t.next_obs) {
        throw ValidationError("bellman_targets: non-terminal transition lacks a next observation");
      }
      const TensorPtr q = target.q_values(expand(*t.next_obs)).first;
      double best = q->values[0];
      for (double v : q->values) best = std::max(best, v);
      y += discount * best;
    }
    ys.push_back(std::min(y, max_target));
  }
  const int n = static_cast<int>(ys.size());
  return Tensor::from_values({n}, std::move(ys));
}

double train_step(const std::vector<Transition>& batch, FollowNetModel& model,
                  const FollowNetModel& target, const TrainingConfig& config,
                  SgdOptimizer& optimizer, double max_target) {
  if (batch.empty()) throw NotReadyError("train_step: empty batch");
  const TensorPtr targets = bellman_targets(batch, target, config.discount, max_target);

  std::vector<TensorPtr> terms;
  terms.reserve(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Transition& t = batch[j];
    if (!t.obs) throw ValidationError("train_step: transition lacks an observation");
    const TensorPtr q = model.q_values(expand(*t.obs)).first;
    if (t.action < 0 || t.action >= static_cast<int>(q->values.size())) {
      throw ValidationError("train_step: action " + std::to_string(t.action) +
                            " outside the Q head");
    }
    terms.push_back(squared_error(pick(q, t.action), targets->values[j]));
  }
  const TensorPtr loss = scale(sum_scalars(terms), 1.0 / static_cast<double>(batch.size()));
  backward(loss);
  optimizer.step(model.params());
  return loss->values[0];
}

void sync_target(const FollowNetModel& model, FollowNetModel& target) {
  if (!(model.config() == target.config())) {
    throw ConfigError("sync_target: online and target architectures differ");
  }
  target.params().copy_values_from(model.params());
}

std::string TrainingLog::to_csv() const {
  std::string out = "step,avg_return,full_success,partial_success,no_progress,epsilon,loss\n";
  char buf[256];
  for (const TrainingLogRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%lld,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.step,
                  r.avg_return, r.full_success, r.partial_success, r.no_progress, r.epsilon,
                  r.loss);
    out += buf;
  }
  return out;
}

TrainingResult train(const InstructionDataset& dataset,
                     const std::map<std::string, HouseMap>& houses,
                     const ArchitectureConfig& arch, const TrainingConfig& config,
                     const std::string& checkpoint_path, const std::string& log_path) {
  validate_training_config(config);
  if (arch.vocab_size != dataset.vocab.size()) {
    throw ConfigError("train: architecture expects a vocabulary of " +
                      std::to_string(arch.vocab_size) + " tokens but the dataset has " +
                      std::to_string(dataset.vocab.size()));
  }

  std::vector<int> pool;
  bool any_holdout = false;
  int max_waypoints = 1;
  std::set<std::string> house_names;
  for (int i = 0; i < static_cast<int>(dataset.instructions.size()); ++i) {
    const Instruction& ins = dataset.instructions[static_cast<std::size_t>(i)];
    if (ins.split_tag == SplitTag::kTrain) {
      pool.push_back(i);
    } else {
      any_holdout = true;
    }
    if (static_cast<int>(ins.tokens.size()) > arch.max_tokens) {
      throw ConfigError("train: instruction with " + std::to_string(ins.tokens.size()) +
                        " tokens exceeds the architecture cap of " +
                        std::to_string(arch.max_tokens));
    }
    const std::set<std::string> distinct(ins.waypoints.begin(), ins.waypoints.end());
    max_waypoints = std::max(max_waypoints, static_cast<int>(distinct.size()));
    house_names.insert(ins.house_name);
  }
  if (pool.empty()) throw ValidationError("train: dataset has no train-split instructions");
  for (const std::string& name : house_names) {
    const auto it = houses.find(name);
    if (it == houses.end()) throw ValidationError("train: house '" + name + "' is not loaded");
    if (static_cast<int>(it->second.class_names.size()) != arch.image_channels) {
      throw ConfigError("train: house '" + name + "' has " +
                        std::to_string(it->second.class_names.size()) +
                        " semantic classes but the architecture expects " +
                        std::to_string(arch.image_channels) + " channels");
    }
  }
  const SplitTag eval_split = any_holdout ? SplitTag::kHoldout : SplitTag::kTrain;

  FollowNetModel model(arch, derive_seed(config.rng_seed, "init"));
  FollowNetModel target(arch, derive_seed(config.rng_seed, "init"));
  sync_target(model, target);

  SgdOptimizer optimizer(config.learning_rate, config.momentum);
  ReplayBuffer buffer(config.replay_capacity);
  Rng sampler = substream(config.rng_seed, "sampler");
  Rng action_rng = substream(config.rng_seed, "actions");
  Rng replay_rng = substream(config.rng_seed, "replay");
  const std::uint64_t env_base = derive_seed(config.rng_seed, "env");
  const std::uint64_t eval_base = derive_seed(config.rng_seed, "eval");

  const SimParams sim{RenderParams{arch.image_height, arch.image_width},
                      config.max_episode_steps};
  const double max_target = config.clip_targets
                                ? 1.0 + 0.05 * static_cast<double>(max_waypoints)
                                : std::numeric_limits<double>::infinity();

  TrainingLog log;
  double loss_sum = 0.0;
  long long loss_count = 0;
  long long env_step = 0;
  long long updates = 0;
  std::uint64_t episode_idx = 0;
  std::uint64_t eval_idx = 0;
  bool stop = false;

  const auto run_eval = [&](long long at_step) {
    const EvalSummary s =
        evaluate_policy(model, houses, dataset, eval_split, config.eval_episodes,
                        derive_seed(eval_base, eval_idx), sim);
    eval_idx += 1;
    TrainingLogRow row;
    row.step = at_step;
    row.avg_return = s.avg_return;
    row.full_success = s.full_fraction;
    row.partial_success = s.partial_fraction;
    row.no_progress = s.none_fraction;
    row.epsilon = epsilon_at(at_step, config);
    row.loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    log.rows.push_back(row);
    loss_sum = 0.0;
    loss_count = 0;
    return s.full_fraction;
  };

  const auto save_artifacts = [&]() {
    if (!checkpoint_path.empty()) save_checkpoint(model, checkpoint_path);
    if (!log_path.empty()) {
      std::ofstream out(log_path, std::ios::binary);
      if (!out) throw IoError("cannot open '" + log_path + "' for writing");
      out << log.to_csv();
      out.flush();
      if (!out) throw IoError("failed writing '" + log_path + "'");
    }
  };

  try {
    while (env_step < config.total_env_steps && !stop) {
      const Instruction& ins =
          dataset.instructions[static_cast<std::size_t>(
              pool[static_cast<std::size_t>(sampler.uniform_int(static_cast<int>(pool.size())))])];
      const HouseMap& house = houses.at(ins.house_name);
      auto [state, obs] = reset_episode(house, ins, derive_seed(env_base, episode_idx), sim);
      episode_idx += 1;
      auto current = std::make_shared<const CompactObservation>(compact(obs));

      while (!state.done && env_step < config.total_env_steps && !stop) {
        if (env_step % config.eval_every == 0) {
          const double full = run_eval(env_step);
          if (config.early_stop_success >= 0.0 && full >= config.early_stop_success) {
            stop = true;
            break;
          }
        }
        TensorPtr q;
        {
          NoGradGuard frozen;
          q = model.q_values(obs).first;
        }
        const int action = select_action(q, epsilon_at(env_step, config), action_rng);
        StepResult result = step(house, state, ins, static_cast<Action>(action), sim);
        auto next = std::make_shared<const CompactObservation>(compact(result.observation));
        buffer.push({current, action, result.reward, next, result.done});
        current = std::move(next);
        obs = std::move(result.observation);
        env_step += 1;

        if (env_step >= config.warmup_steps && buffer.size() >= config.batch_size) {
          for (int u = 0; u < config.updates_per_env_step; ++u) {
            const std::vector<Transition> batch = buffer.sample(config.batch_size, replay_rng);
            loss_sum += train_step(batch, model, target, config, optimizer, max_target);
            loss_count += 1;
            updates += 1;
            if (updates % config.target_sync_every == 0) sync_target(model, target);
          }
        }
      }
    }
    if (config.total_env_steps > 0 &&
        (log.rows.empty() || log.rows.back().step != env_step)) {
      run_eval(env_step);
    }
  } catch (...) {
    // Keep the last good state reachable, but never mask the original error.
    try {
      save_artifacts();
    } catch (...) {
    }
    throw;
  }

  save_artifacts();
  return {std::move(model), std::move(log)};
}

}  // namespace follownet
