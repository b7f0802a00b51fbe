#pragma once

#include <map>
#include <string>
#include <vector>

namespace follownet {

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kUnkToken = "<unk>";

// Token ids are dense: 0 = PAD, 1 = UNK, then all distinct corpus tokens in
// lexicographic order, so a fixed corpus always yields the same ids.
class Vocabulary {
 public:
  Vocabulary();

  int id(const std::string& token) const;          // kUnkId when absent
  const std::string& token(int id) const;          // throws on out-of-range
  int size() const { return static_cast<int>(id_to_token_.size()); }
  bool contains(const std::string& token) const { return token_to_id_.count(token) > 0; }

  // Inserts a non-reserved token (no-op if present). Used by build_vocab.
  void insert(const std::string& token);

 private:
  std::map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

// Lowercases, splits on whitespace, and detaches commas and periods into
// standalone tokens.
std::vector<std::string> tokenize_words(const std::string& text);

// Word tokens mapped through the vocabulary (unknowns become UNK).
std::vector<int> tokenize(const std::string& text, const Vocabulary& vocab);

// Space-joined token strings; PAD ids are dropped.
std::string detokenize(const std::vector<int>& ids, const Vocabulary& vocab);

// All distinct tokens of the corpus, sorted, after the reserved entries.
Vocabulary build_vocab(const std::vector<std::string>& corpus);

}  // namespace follownet
