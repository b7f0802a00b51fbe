#include "follownet/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "follownet/errors.hpp"

namespace follownet {

Vocabulary::Vocabulary() {
  id_to_token_ = {kPadToken, kUnkToken};
  token_to_id_ = {{kPadToken, kPadId}, {kUnkToken, kUnkId}};
}

int Vocabulary::id(const std::string& token) const {
  const auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) {
    throw ValidationError("vocabulary: id " + std::to_string(id) + " out of range (size " +
                          std::to_string(size()) + ")");
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

void Vocabulary::insert(const std::string& token) {
  if (token_to_id_.count(token) > 0) return;
  token_to_id_[token] = size();
  id_to_token_.push_back(token);
}

std::vector<std::string> tokenize_words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  };
  for (char raw : text) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (c == ',' || c == '.') {
      flush();
      out.push_back(std::string(1, c));
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

std::vector<int> tokenize(const std::string& text, const Vocabulary& vocab) {
  std::vector<int> ids;
  for (const std::string& w : tokenize_words(text)) ids.push_back(vocab.id(w));
  return ids;
}

std::string detokenize(const std::vector<int>& ids, const Vocabulary& vocab) {
  std::string out;
  for (int id : ids) {
    if (id == kPadId) continue;
    if (!out.empty()) out += ' ';
    out += vocab.token(id);
  }
  return out;
}

Vocabulary build_vocab(const std::vector<std::string>& corpus) {
  std::set<std::string> tokens;
  for (const std::string& text : corpus) {
    for (const std::string& w : tokenize_words(text)) {
      if (w != kPadToken && w != kUnkToken) tokens.insert(w);
    }
  }
  Vocabulary v;
  for (const std::string& t : tokens) v.insert(t);
  return v;
}

}  // namespace follownet
