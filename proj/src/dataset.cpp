#include "follownet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "follownet/errors.hpp"
#include "follownet/rng.hpp"

namespace follownet {

namespace {

std::vector<std::string> train_texts(const InstructionDataset& ds) {
  std::vector<std::string> texts;
  for (const Instruction& ins : ds.instructions) {
    if (ins.split_tag == SplitTag::kTrain) texts.push_back(ins.text);
  }
  return texts;
}

}  // namespace

void finalize_dataset(InstructionDataset& ds) {
  std::vector<std::string> corpus = train_texts(ds);
  if (corpus.empty()) {
    // All-hold-out files (e.g. standalone evaluation sets) still need a
    // usable vocabulary; fall back to the full corpus.
    for (const Instruction& ins : ds.instructions) corpus.push_back(ins.text);
  }
  ds.vocab = build_vocab(corpus);
  std::set<std::string> houses;
  for (Instruction& ins : ds.instructions) {
    ins.tokens = tokenize(ins.text, ds.vocab);
    if (ins.tokens.empty()) {
      throw ValidationError("dataset: instruction '" + ins.text + "' tokenizes to nothing");
    }
    if (static_cast<int>(ins.tokens.size()) > kMaxInstructionTokens) {
      throw ValidationError("dataset: instruction exceeds " +
                            std::to_string(kMaxInstructionTokens) + " tokens: '" + ins.text + "'");
    }
    houses.insert(ins.house_name);
  }
  ds.houses.assign(houses.begin(), houses.end());
}

void save_dataset(const InstructionDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write dataset file '" + path + "'");
  for (const Instruction& ins : ds.instructions) {
    if (ins.waypoints.empty()) {
      throw ValidationError("dataset: instruction '" + ins.text + "' has no waypoints");
    }
    nlohmann::ordered_json rec;
    rec["house"] = ins.house_name;
    rec["start_region"] = ins.start_region;
    rec["goal_region"] = ins.waypoints.back();
    rec["waypoints"] =
        std::vector<std::string>(ins.waypoints.begin(), ins.waypoints.end() - 1);
    rec["text"] = ins.text;
    rec["split"] = ins.split_tag == SplitTag::kTrain ? "train" : "holdout";
    out << rec.dump() << "\n";
  }
  if (!out) throw IoError("failed writing dataset file '" + path + "'");
}

InstructionDataset load_dataset(const std::string& path,
                                const std::map<std::string, HouseMap>& houses) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file '" + path + "'");

  InstructionDataset ds;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("dataset record " + std::to_string(line_no) + ": " + e.what());
    }
    auto need = [&](const char* key) -> const nlohmann::json& {
      if (!rec.contains(key)) {
        throw ParseError("dataset record " + std::to_string(line_no) + ": missing field '" +
                         key + "'");
      }
      return rec.at(key);
    };
    Instruction ins;
    ins.house_name = need("house").get<std::string>();
    ins.start_region = need("start_region").get<std::string>();
    for (const auto& wp : need("waypoints")) {
      ins.waypoints.push_back(wp.get<std::string>());
    }
    ins.waypoints.push_back(need("goal_region").get<std::string>());
    ins.text = need("text").get<std::string>();
    const std::string split = need("split").get<std::string>();
    if (split == "train") {
      ins.split_tag = SplitTag::kTrain;
    } else if (split == "holdout") {
      ins.split_tag = SplitTag::kHoldout;
    } else {
      throw ParseError("dataset record " + std::to_string(line_no) + ": unknown split '" +
                       split + "'");
    }

    const auto hit = houses.find(ins.house_name);
    if (hit == houses.end()) {
      throw ValidationError("dataset record " + std::to_string(line_no) + ": unknown house '" +
                            ins.house_name + "'");
    }
    const HouseMap& house = hit->second;
    if (house.region(ins.start_region) == nullptr) {
      throw ValidationError("dataset record " + std::to_string(line_no) +
                            ": unknown start region '" + ins.start_region + "' in house '" +
                            ins.house_name + "'");
    }
    for (const std::string& wp : ins.waypoints) {
      if (house.region(wp) == nullptr) {
        throw ValidationError("dataset record " + std::to_string(line_no) +
                              ": unknown waypoint region '" + wp + "' in house '" +
                              ins.house_name + "'");
      }
    }
    ds.instructions.push_back(std::move(ins));
  }
  finalize_dataset(ds);

  // Hold-out items must stay inside the train vocabulary.
  for (const Instruction& ins : ds.instructions) {
    if (ins.split_tag != SplitTag::kHoldout) continue;
    for (int id : ins.tokens) {
      if (id == kUnkId) {
        throw ValidationError("dataset: hold-out instruction '" + ins.text +
                              "' uses words absent from the train split");
      }
    }
  }
  return ds;
}

InstructionDataset split_dataset(const InstructionDataset& ds, double holdout_fraction,
                                 std::uint64_t rng_seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("split: holdout fraction must lie strictly between 0 and 1");
  }
  const int n = static_cast<int>(ds.instructions.size());
  if (n < 2) throw SplitError("split: need at least two instructions");
  const int target = static_cast<int>(std::ceil(holdout_fraction * n));

  // Group records by (start, goal) so a pair never straddles the split.
  std::map<std::pair<std::string, std::string>, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    const Instruction& ins = ds.instructions[static_cast<std::size_t>(i)];
    groups[{ins.start_region, ins.waypoints.back()}].push_back(i);
  }
  std::vector<std::vector<int>> group_list;
  for (auto& [key, idxs] : groups) group_list.push_back(idxs);

  constexpr int kMaxTries = 1000;
  for (int attempt = 0; attempt < kMaxTries; ++attempt) {
    Rng rng(derive_seed(rng_seed, static_cast<std::uint64_t>(attempt)));
    std::vector<int> order(group_list.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    rng.shuffle(order);

    std::set<int> holdout;
    for (int gi : order) {
      if (static_cast<int>(holdout.size()) >= target) break;
      for (int idx : group_list[static_cast<std::size_t>(gi)]) holdout.insert(idx);
    }
    if (static_cast<int>(holdout.size()) >= n) continue;  // train side must stay nonempty
    if (static_cast<int>(holdout.size()) < target) continue;

    InstructionDataset out = ds;
    for (int i = 0; i < n; ++i) {
      out.instructions[static_cast<std::size_t>(i)].split_tag =
          holdout.count(i) > 0 ? SplitTag::kHoldout : SplitTag::kTrain;
    }

    // Vocabulary constraint: every hold-out word must exist in the train split.
    std::set<std::string> train_words;
    for (const Instruction& ins : out.instructions) {
      if (ins.split_tag != SplitTag::kTrain) continue;
      for (const std::string& w : tokenize_words(ins.text)) train_words.insert(w);
    }
    bool ok = true;
    for (const Instruction& ins : out.instructions) {
      if (ins.split_tag != SplitTag::kHoldout) continue;
      for (const std::string& w : tokenize_words(ins.text)) {
        if (train_words.count(w) == 0) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (!ok) continue;

    finalize_dataset(out);
    return out;
  }
  throw SplitError("split: no valid hold-out assignment after " + std::to_string(kMaxTries) +
                   " attempts; try a smaller holdout fraction");
}

}  // namespace follownet
