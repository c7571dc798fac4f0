#include "rqa/text.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "rqa/errors.hpp"

namespace rqa {

Tokens tokenize(std::string_view text) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      flush();
      out.emplace_back(1, ch);
    } else if (c < 0x80) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      current.push_back(ch);
    }
  }
  flush();
  return out;
}

std::string join_tokens(const Tokens& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

Vocabulary::Vocabulary() {
  add(std::string(kPadToken));
  add(std::string(kUnkToken));
}

void Vocabulary::add(const std::string& token) {
  lookup_.emplace(token, tokens_.size());
  tokens_.push_back(token);
}

Vocabulary Vocabulary::build(const std::vector<Tokens>& corpus, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& sentence : corpus)
    for (const auto& tok : sentence) ++counts[tok];

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, n] : counts) {
    if (n > min_count && tok != kPadToken && tok != kUnkToken) kept.emplace_back(tok, n);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  Vocabulary v;
  v.min_count_ = min_count;
  for (const auto& [tok, n] : kept) v.add(tok);
  return v;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens, std::size_t min_count) {
  if (tokens.size() < 2 || tokens[0] != kPadToken || tokens[1] != kUnkToken) {
    throw FormatError("vocabulary must start with " + std::string(kPadToken) + ", " +
                      std::string(kUnkToken));
  }
  Vocabulary v;
  v.min_count_ = min_count;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    if (v.lookup_.count(tokens[i])) throw FormatError("duplicate vocabulary token: " + tokens[i]);
    v.add(tokens[i]);
  }
  return v;
}

std::size_t Vocabulary::index(std::string_view token) const {
  auto it = lookup_.find(std::string(token));
  return it == lookup_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return lookup_.count(std::string(token)) > 0; }

std::vector<std::size_t> Vocabulary::indices(const Tokens& tokens) const {
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(index(t));
  return out;
}

void Lexicon::add(LexClass cls, std::string word) {
  words_[static_cast<std::size_t>(cls)].insert(std::move(word));
}

std::bitset<kNumLexClasses> Lexicon::classes_of(std::string_view token) const {
  std::bitset<kNumLexClasses> bits;
  for (std::size_t c = 0; c < kNumLexClasses; ++c) {
    if (words_[c].find(token) != words_[c].end()) bits.set(c);
  }
  return bits;
}

Lexicon Lexicon::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("lexicon must be a JSON object of class -> word list");
  Lexicon lex;
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto name = std::find(kLexClassNames.begin(), kLexClassNames.end(), it.key());
    if (name == kLexClassNames.end()) throw ValidationError("unknown lexicon class: " + it.key());
    if (!it.value().is_array()) throw ValidationError("lexicon class " + it.key() + " must be an array");
    const auto cls = static_cast<LexClass>(name - kLexClassNames.begin());
    for (const auto& w : it.value()) {
      if (!w.is_string()) throw ValidationError("lexicon class " + it.key() + " holds a non-string");
      lex.add(cls, w.get<std::string>());
    }
  }
  return lex;
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("lexicon " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::ordered_json Lexicon::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < kNumLexClasses; ++c) {
    j[std::string(kLexClassNames[c])] = std::vector<std::string>(words_[c].begin(), words_[c].end());
  }
  return j;
}

Lexicon Lexicon::starter() {
  Lexicon lex;
  for (const char* w : {"yes", "yeah", "yep", "sure", "ok", "okay", "certainly", "definitely",
                        "absolutely", "right", "correct", "course", "indeed", "exactly"})
    lex.add(LexClass::Affirmative, w);
  for (const char* w : {"no", "not", "never", "nope", "none", "nothing", "neither", "nor", "without",
                        "except", "nah"})
    lex.add(LexClass::Privative, w);
  for (const char* w : {"maybe", "perhaps", "guess", "sometimes", "depends", "unsure", "possibly",
                        "probably", "whatever", "who", "knows"})
    lex.add(LexClass::Suspicious, w);
  for (const char* w : {"like", "love", "enjoy", "good", "great", "happy", "fine", "prefer", "nice",
                        "please", "thanks", "either", "both", "all", "any"})
    lex.add(LexClass::Positive, w);
  for (const char* w : {"hate", "dislike", "bad", "terrible", "awful", "worse", "tired", "boring"})
    lex.add(LexClass::Negative, w);
  for (const char* w : {"if", "suppose", "assume", "would", "should", "might", "could", "think"})
    lex.add(LexClass::Supposed, w);
  return lex;
}

}  // namespace rqa
