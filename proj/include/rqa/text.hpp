#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace rqa {

using Tokens = std::vector<std::string>;

/// Lowercases ASCII letters, splits on whitespace and emits every ASCII
/// punctuation character as its own token. Bytes outside ASCII pass through
/// untouched, so pre-segmented non-Latin text survives.
Tokens tokenize(std::string_view text);

std::string join_tokens(const Tokens& tokens);

class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  /// Keeps tokens occurring strictly more than `min_count` times. Indices
  /// after PAD/UNK follow descending count, ties broken lexicographically.
  static Vocabulary build(const std::vector<Tokens>& corpus, std::size_t min_count = 2);

  /// Rebuilds from an index-ordered token list (as stored in checkpoints).
  static Vocabulary from_tokens(const std::vector<std::string>& tokens, std::size_t min_count);

  std::size_t index(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(std::size_t index) const { return tokens_.at(index); }
  std::size_t size() const { return tokens_.size(); }
  std::size_t min_count() const { return min_count_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

  std::vector<std::size_t> indices(const Tokens& tokens) const;

  bool operator==(const Vocabulary& other) const {
    return tokens_ == other.tokens_ && min_count_ == other.min_count_;
  }

 private:
  void add(const std::string& token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> lookup_;
  std::size_t min_count_ = 2;
};

/// Keyword classes in their fixed embedding-block order.
enum class LexClass : std::size_t {
  Affirmative = 0,
  Privative,
  Suspicious,
  Positive,
  Negative,
  Supposed,
};

inline constexpr std::size_t kNumLexClasses = 6;
inline constexpr std::array<std::string_view, kNumLexClasses> kLexClassNames = {
    "affirmative", "privative", "suspicious", "positive", "negative", "supposed"};

class Lexicon {
 public:
  using WordSet = std::set<std::string, std::less<>>;

  void add(LexClass cls, std::string word);
  std::bitset<kNumLexClasses> classes_of(std::string_view token) const;
  const WordSet& words(LexClass cls) const { return words_[static_cast<std::size_t>(cls)]; }

  /// JSON object keyed by class name. Missing classes are empty; unknown
  /// class names are rejected with ValidationError.
  static Lexicon from_json(const nlohmann::json& j);
  static Lexicon load(const std::string& path);
  nlohmann::ordered_json to_json() const;

  /// Small English keyword list bundled with the toolkit. It is a starting
  /// point for the synthetic corpora, not a canonical resource.
  static Lexicon starter();

  bool operator==(const Lexicon& other) const { return words_ == other.words_; }

 private:
  std::array<WordSet, kNumLexClasses> words_;
};

}  // namespace rqa
