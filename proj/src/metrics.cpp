#include "follownet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <utility>

#include "follownet/errors.hpp"
#include "follownet/rng.hpp"

namespace follownet {

namespace {

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

// Quotes a field when needed so punctuation tokens like "," stay one column.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

SuccessClass classify(int reached, int total) {
  if (reached >= total) return SuccessClass::kFull;
  if (reached == 0) return SuccessClass::kNone;
  return SuccessClass::kPartial;
}

int distinct_count(const std::vector<std::string>& names) {
  return static_cast<int>(std::set<std::string>(names.begin(), names.end()).size());
}

const Instruction& instruction_for(const EpisodeReport& report, const InstructionDataset& ds,
                                   const char* op) {
  if (report.instruction_id < 0 ||
      report.instruction_id >= static_cast<int>(ds.instructions.size())) {
    throw ValidationError(std::string(op) + ": report references instruction " +
                          std::to_string(report.instruction_id) +
                          " outside the dataset (size " +
                          std::to_string(ds.instructions.size()) + ")");
  }
  return ds.instructions[static_cast<std::size_t>(report.instruction_id)];
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

int turn_actions(const EpisodeReport& r) {
  return r.action_counts[static_cast<int>(Action::kTurnLeft)] +
         r.action_counts[static_cast<int>(Action::kTurnRight)];
}

int total_actions(const EpisodeReport& r) {
  int n = 0;
  for (int c : r.action_counts) n += c;
  return n;
}

}  // namespace

const std::string& success_class_name(SuccessClass c) {
  static const std::string kNames[] = {"full", "partial", "none"};
  return kNames[static_cast<int>(c)];
}

EpisodeReport run_episode(const FollowNetModel& model, const HouseMap& house,
                          const Instruction& instruction, std::uint64_t seed, bool greedy,
                          double epsilon, const SimParams& params) {
  NoGradGuard frozen;
  auto [state, obs] = reset_episode(house, instruction, seed, params);
  Rng explore(derive_seed(seed, 1));  // reset consumed the raw seed's stream

  EpisodeReport report;
  report.waypoints_total = distinct_count(instruction.waypoints);
  report.tokens = instruction.tokens;
  const bool with_attention = model.config().use_attention;
  if (with_attention) report.attention.resize(instruction.tokens.size());

  while (!state.done) {
    auto [q, trace] = model.q_values(obs);
    if (with_attention) {
      for (std::size_t i = 0; i < report.attention.size(); ++i) {
        report.attention[i].push_back(trace.alpha->values[i]);
      }
    }
    const int action = greedy ? greedy_action(q) : select_action(q, epsilon, explore);
    report.action_counts[static_cast<std::size_t>(action)] += 1;
    StepResult result = step(house, state, instruction, static_cast<Action>(action), params);
    report.total_return += result.reward;
    obs = std::move(result.observation);
  }

  report.steps_taken = state.steps_taken;
  report.waypoints_reached = static_cast<int>(state.visited_waypoints.size());
  report.success_class = classify(report.waypoints_reached, report.waypoints_total);
  return report;
}

EvalSummary evaluate_policy(const FollowNetModel& model,
                            const std::map<std::string, HouseMap>& houses,
                            const InstructionDataset& ds, SplitTag split, int episodes,
                            std::uint64_t rng_seed, const SimParams& params) {
  if (episodes < 1) throw ConfigError("evaluate_policy: episode count must be positive");
  std::vector<int> pool;
  for (int i = 0; i < static_cast<int>(ds.instructions.size()); ++i) {
    if (ds.instructions[static_cast<std::size_t>(i)].split_tag == split) pool.push_back(i);
  }
  if (pool.empty()) {
    throw ValidationError("evaluate_policy: dataset has no instructions in the requested split");
  }

  EvalSummary summary;
  summary.episodes = episodes;
  summary.reports.reserve(static_cast<std::size_t>(episodes));
  int counts[3] = {0, 0, 0};
  for (int e = 0; e < episodes; ++e) {
    const int idx = pool[static_cast<std::size_t>(e) % pool.size()];
    const Instruction& ins = ds.instructions[static_cast<std::size_t>(idx)];
    auto it = houses.find(ins.house_name);
    if (it == houses.end()) {
      throw ValidationError("evaluate_policy: house '" + ins.house_name + "' is not loaded");
    }
    EpisodeReport report =
        run_episode(model, it->second, ins, derive_seed(rng_seed, static_cast<std::uint64_t>(e)),
                    /*greedy=*/true, /*epsilon=*/0.0, params);
    report.instruction_id = idx;
    summary.avg_return += report.total_return;
    counts[static_cast<int>(report.success_class)] += 1;
    summary.reports.push_back(std::move(report));
  }
  summary.avg_return /= episodes;
  summary.full_fraction = static_cast<double>(counts[0]) / episodes;
  summary.partial_fraction = static_cast<double>(counts[1]) / episodes;
  summary.none_fraction = static_cast<double>(counts[2]) / episodes;
  return summary;
}

WaypointHistogram waypoint_histogram(const std::vector<EpisodeReport>& reports) {
  if (reports.empty()) throw ValidationError("waypoint_histogram: no reports");
  WaypointHistogram hist;
  for (const EpisodeReport& r : reports) {
    if (r.waypoints_total < 1 || r.waypoints_reached < 0 ||
        r.waypoints_reached > r.waypoints_total) {
      throw ValidationError("waypoint_histogram: report has inconsistent waypoint counts");
    }
    if (r.waypoints_reached == 0) {
      hist.none += 1.0;
    } else if (r.waypoints_reached == r.waypoints_total) {
      hist.full += 1.0;
    } else if (2 * r.waypoints_reached <= r.waypoints_total) {
      hist.half_or_less += 1.0;
    } else {
      hist.more_than_half += 1.0;
    }
  }
  const double n = static_cast<double>(reports.size());
  hist.none /= n;
  hist.half_or_less /= n;
  hist.more_than_half /= n;
  hist.full /= n;
  return hist;
}

std::map<std::string, double> per_word_success(const std::vector<EpisodeReport>& reports,
                                               const InstructionDataset& ds) {
  std::map<std::string, std::pair<int, int>> tallies;  // word -> (episodes, full successes)
  for (const EpisodeReport& r : reports) {
    const Instruction& ins = instruction_for(r, ds, "per_word_success");
    const std::vector<std::string> words = tokenize_words(ins.text);
    const std::set<std::string> unique(words.begin(), words.end());
    const int win = r.success_class == SuccessClass::kFull ? 1 : 0;
    for (const std::string& w : unique) {
      auto& tally = tallies[w];
      tally.first += 1;
      tally.second += win;
    }
  }
  std::map<std::string, double> rates;
  for (const auto& [word, tally] : tallies) {
    rates[word] = static_cast<double>(tally.second) / tally.first;
  }
  return rates;
}

StepStatistics step_statistics(const std::vector<EpisodeReport>& reports) {
  if (reports.empty()) throw ValidationError("step_statistics: no reports");
  StepStatistics stats;
  long long step_sum = 0;
  std::map<SuccessClass, std::pair<long long, long long>> by_class;   // (turns, actions)
  std::map<int, std::pair<long long, long long>> by_waypoints;

  for (const EpisodeReport& r : reports) {
    if (r.success_class == SuccessClass::kFull) {
      if (stats.full_episodes == 0) {
        stats.min_steps = r.steps_taken;
        stats.max_steps = r.steps_taken;
      } else {
        stats.min_steps = std::min(stats.min_steps, r.steps_taken);
        stats.max_steps = std::max(stats.max_steps, r.steps_taken);
      }
      stats.full_episodes += 1;
      step_sum += r.steps_taken;
    }
    const int turns = turn_actions(r);
    const int actions = total_actions(r);
    auto& c = by_class[r.success_class];
    c.first += turns;
    c.second += actions;
    auto& w = by_waypoints[r.waypoints_total];
    w.first += turns;
    w.second += actions;
  }

  if (stats.full_episodes > 0) {
    stats.mean_steps = static_cast<double>(step_sum) / stats.full_episodes;
  }
  for (const auto& [cls, tally] : by_class) {
    stats.turn_fraction_by_class[cls] =
        tally.second > 0 ? static_cast<double>(tally.first) / tally.second : 0.0;
  }
  for (const auto& [count, tally] : by_waypoints) {
    stats.turn_fraction_by_waypoints[count] =
        tally.second > 0 ? static_cast<double>(tally.first) / tally.second : 0.0;
  }
  return stats;
}

void export_attention_heatmap(const EpisodeReport& report, const Vocabulary& vocab,
                              const std::string& csv_path, const std::string& pgm_path) {
  if (report.attention.empty()) {
    throw UnsupportedError(
        "attention heatmap requires an attention-mode report (baseline models record none)");
  }
  if (report.attention.size() != report.tokens.size()) {
    throw ValidationError("attention heatmap: row count does not match the token sequence");
  }
  const std::size_t steps = report.attention.front().size();
  if (steps == 0) throw ValidationError("attention heatmap: report has no recorded steps");
  for (const auto& row : report.attention) {
    if (row.size() != steps) {
      throw ValidationError("attention heatmap: ragged attention rows");
    }
  }

  {
    std::ofstream out = open_for_write(csv_path);
    out << "token";
    for (std::size_t t = 0; t < steps; ++t) out << ",step" << t;
    out << "\n";
    for (std::size_t i = 0; i < report.attention.size(); ++i) {
      out << csv_field(vocab.token(report.tokens[i]));
      for (std::size_t t = 0; t < steps; ++t) out << "," << fixed(report.attention[i][t], 9);
      out << "\n";
    }
    finish_write(out, csv_path);
  }

  double peak = 0.0;
  for (const auto& row : report.attention) {
    for (double a : row) peak = std::max(peak, a);
  }
  std::ofstream out = open_for_write(pgm_path);
  out << "P2\n" << steps << " " << report.attention.size() << "\n255\n";
  for (const auto& row : report.attention) {
    for (std::size_t t = 0; t < steps; ++t) {
      const int level =
          peak > 0.0 ? static_cast<int>(std::lround(row[t] / peak * 255.0)) : 0;
      out << level << (t + 1 == steps ? "" : " ");
    }
    out << "\n";
  }
  finish_write(out, pgm_path);
}

void write_report_bundle(const std::vector<EpisodeReport>& reports,
                         const InstructionDataset& ds, const std::string& out_dir) {
  if (reports.empty()) throw ValidationError("write_report_bundle: no reports");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory '" + out_dir + "': " + ec.message());

  {
    const std::string path = out_dir + "/summary.csv";
    std::ofstream out = open_for_write(path);
    out << "episode,instruction_id,house,success,waypoints_reached,waypoints_total,steps,"
           "return,turn_actions,forward_actions\n";
    for (std::size_t e = 0; e < reports.size(); ++e) {
      const EpisodeReport& r = reports[e];
      const Instruction& ins = instruction_for(r, ds, "write_report_bundle");
      out << e << "," << r.instruction_id << "," << ins.house_name << ","
          << success_class_name(r.success_class) << "," << r.waypoints_reached << ","
          << r.waypoints_total << "," << r.steps_taken << "," << fixed(r.total_return, 6) << ","
          << turn_actions(r) << ","
          << r.action_counts[static_cast<int>(Action::kForward)] << "\n";
    }
    finish_write(out, path);
  }

  {
    const std::string path = out_dir + "/histogram.csv";
    std::ofstream out = open_for_write(path);
    const WaypointHistogram hist = waypoint_histogram(reports);
    out << "bucket,share\n";
    out << "none," << fixed(hist.none, 6) << "\n";
    out << "half_or_less," << fixed(hist.half_or_less, 6) << "\n";
    out << "more_than_half," << fixed(hist.more_than_half, 6) << "\n";
    out << "full," << fixed(hist.full, 6) << "\n";
    finish_write(out, path);
  }

  {
    const std::string path = out_dir + "/per_word.csv";
    std::ofstream out = open_for_write(path);
    out << "word,success_rate\n";
    for (const auto& [word, rate] : per_word_success(reports, ds)) {
      out << csv_field(word) << "," << fixed(rate, 6) << "\n";
    }
    finish_write(out, path);
  }

  bool any_attention = false;
  for (const EpisodeReport& r : reports) any_attention = any_attention || !r.attention.empty();
  if (any_attention) {
    const std::string attn_dir = out_dir + "/attention";
    std::filesystem::create_directories(attn_dir, ec);
    if (ec) throw IoError("cannot create directory '" + attn_dir + "': " + ec.message());
    for (std::size_t e = 0; e < reports.size(); ++e) {
      if (reports[e].attention.empty()) continue;
      const std::string base = attn_dir + "/" + std::to_string(e);
      export_attention_heatmap(reports[e], ds.vocab, base + ".csv", base + ".pgm");
    }
  }
}

}  // namespace follownet
