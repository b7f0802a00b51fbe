#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "follownet/house_map.hpp"
#include "follownet/instruction.hpp"
#include "follownet/vocab.hpp"

namespace follownet {

inline constexpr int kMaxInstructionTokens = 64;

// The vocabulary is always derived from the train split, so hold-out items can
// never smuggle new words into the model.
struct InstructionDataset {
  Vocabulary vocab;
  std::vector<Instruction> instructions;
  std::vector<std::string> houses;  // referenced house names, sorted unique
};

// Rebuilds the vocabulary from train-split texts, re-tokenizes every
// instruction, and refreshes the referenced-house list. Call after any edit
// to the instruction list.
void finalize_dataset(InstructionDataset& ds);

// JSON-lines persistence; one record per instruction. The vocabulary is never
// stored (it is a pure function of the train split).
void save_dataset(const InstructionDataset& ds, const std::string& path);

// Loads and validates against the referenced houses: unknown house or region
// names raise a validation error naming the offending record.
InstructionDataset load_dataset(const std::string& path,
                                const std::map<std::string, HouseMap>& houses);

// Re-tags split membership so no hold-out (start, goal) pair appears in train
// and hold-out texts use train vocabulary only. Deterministic per seed;
// resamples until the constraints hold or fails with a split error.
InstructionDataset split_dataset(const InstructionDataset& ds, double holdout_fraction,
                                 std::uint64_t rng_seed);

}  // namespace follownet
