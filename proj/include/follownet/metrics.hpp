#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "follownet/dataset.hpp"
#include "follownet/env.hpp"
#include "follownet/house_map.hpp"
#include "follownet/instruction.hpp"
#include "follownet/model.hpp"
#include "follownet/vocab.hpp"

namespace follownet {

// Three-way episode outcome: every waypoint reached, some but not all, none.
enum class SuccessClass { kFull = 0, kPartial = 1, kNone = 2 };

const std::string& success_class_name(SuccessClass c);

// Everything recorded about one evaluation rollout. Waypoint counts are over
// distinct regions (the environment credits each region once). `attention` has
// one row per instruction token and one column per step; it is empty for
// baseline (no-attention) models.
struct EpisodeReport {
  int instruction_id = -1;  // index into the dataset that produced it
  int waypoints_total = 0;
  int waypoints_reached = 0;
  int steps_taken = 0;
  double total_return = 0.0;
  SuccessClass success_class = SuccessClass::kNone;
  std::array<int, kNumActions> action_counts{};
  std::vector<int> tokens;
  std::vector<std::vector<double>> attention;  // [token][step]
};

// Rolls out one episode with frozen parameters, greedy or ε-greedy. The seed
// drives the start pose draw and (via an independent substream) any
// exploration draws, so equal seeds give bitwise-equal reports.
EpisodeReport run_episode(const FollowNetModel& model, const HouseMap& house,
                          const Instruction& instruction, std::uint64_t seed, bool greedy,
                          double epsilon = 0.1, const SimParams& params = {});

// Aggregate of one evaluation sweep; reports keep per-episode detail.
struct EvalSummary {
  int episodes = 0;
  double avg_return = 0.0;
  double full_fraction = 0.0;
  double partial_fraction = 0.0;
  double none_fraction = 0.0;
  std::vector<EpisodeReport> reports;
};

// Greedy-evaluates `episodes` queries built by cycling through the requested
// split in dataset order and redrawing the start pose per query (episode e
// uses derive_seed(rng_seed, e)).
EvalSummary evaluate_policy(const FollowNetModel& model,
                            const std::map<std::string, HouseMap>& houses,
                            const InstructionDataset& ds, SplitTag split, int episodes,
                            std::uint64_t rng_seed, const SimParams& params = {});

// Shares of episodes bucketed by fraction of waypoints reached:
// exactly 0, (0, 0.5], (0.5, 1), exactly 1. Shares sum to 1.
struct WaypointHistogram {
  double none = 0.0;
  double half_or_less = 0.0;
  double more_than_half = 0.0;
  double full = 0.0;
};

WaypointHistogram waypoint_histogram(const std::vector<EpisodeReport>& reports);

// For each word that occurs in at least one episode's instruction text, the
// fraction of those episodes (counting each episode once however often the
// word repeats) that ended in full success.
std::map<std::string, double> per_word_success(const std::vector<EpisodeReport>& reports,
                                               const InstructionDataset& ds);

// Step-count spread over full-success episodes plus the share of actions that
// were turns, grouped by outcome class and by waypoint count. Pooled ratios:
// (all turn actions in the group) / (all actions in the group).
struct StepStatistics {
  int full_episodes = 0;
  int min_steps = 0;
  int max_steps = 0;
  double mean_steps = 0.0;
  std::map<SuccessClass, double> turn_fraction_by_class;
  std::map<int, double> turn_fraction_by_waypoints;
};

StepStatistics step_statistics(const std::vector<EpisodeReport>& reports);

// Writes the per-step attention weights as a CSV (rows = token strings,
// columns = steps) and as an ASCII PGM scaled so the file's peak weight maps
// to white. Reports from baseline models carry no attention data and are
// rejected with an unsupported-mode error.
void export_attention_heatmap(const EpisodeReport& report, const Vocabulary& vocab,
                              const std::string& csv_path, const std::string& pgm_path);

// Writes summary.csv, histogram.csv, per_word.csv, and (when attention data is
// present) attention/<episode>.csv|.pgm under `out_dir`, creating directories
// as needed.
void write_report_bundle(const std::vector<EpisodeReport>& reports,
                         const InstructionDataset& ds, const std::string& out_dir);

}  // namespace follownet
