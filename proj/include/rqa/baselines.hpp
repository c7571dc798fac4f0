#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rqa/batching.hpp"
#include "rqa/dataset.hpp"
#include "rqa/models.hpp"
#include "rqa/text.hpp"

namespace rqa {

struct Rule {
  std::set<std::string, std::less<>> keywords;
  Label label = Label::Uncertain;
};

/// Ordered keyword rules; the first rule with a keyword present in the
/// answer decides, otherwise `default_label`.
struct RuleTable {
  std::vector<Rule> rules;
  Label default_label = Label::Uncertain;

  /// {"rules": [{"keywords": [...], "label": 0|1|2}, ...], "default_label": 0|1|2}
  static RuleTable from_json(const nlohmann::json& j);
  static RuleTable load(const std::string& path);
  nlohmann::ordered_json to_json() const;

  /// Negation first, then affirmation, then hedging; defaults to Uncertain.
  static RuleTable starter();
};

Label rule_classify(const Tokens& answer, const RuleTable& table);

/// Sparse token counts over a vocabulary; OOV tokens count toward UNK.
struct BowVector {
  std::size_t dim = 0;
  std::vector<std::pair<std::size_t, double>> entries;  // ascending index, nonzero counts
};

BowVector bow_vectorize(const Tokens& tokens, const Vocabulary& vocab);

enum class BowInput { A, AQ };

std::string_view bow_input_name(BowInput m);
BowInput parse_bow_input(std::string_view name);

/// Tokens seen by the BOW model: the answer, or question followed by answer.
Tokens bow_tokens(const Instance& inst, BowInput mode);

struct BowTrainConfig {
  BowInput mode = BowInput::A;
  std::size_t epochs = 100;
  double lr = 0.5;
  double l2 = 1e-4;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
};

/// Multinomial logistic regression over BOW counts, W[dim x 3] + b[3].
class SoftmaxRegression {
 public:
  SoftmaxRegression() = default;
  SoftmaxRegression(std::size_t dim, BowInput mode);

  ClassProbs predict(const BowVector& x) const;
  ClassProbs predict(const Instance& inst, const Vocabulary& vocab) const;

  std::size_t dim() const { return dim_; }
  BowInput mode() const { return mode_; }
  std::vector<double>& weights() { return W_; }
  const std::vector<double>& weights() const { return W_; }
  std::vector<double>& bias() { return b_; }
  const std::vector<double>& bias() const { return b_; }

 private:
  std::size_t dim_ = 0;
  BowInput mode_ = BowInput::A;
  std::vector<double> W_;
  std::vector<double> b_ = std::vector<double>(kNumClasses, 0.0);
};

/// Mini-batch gradient descent on mean cross-entropy with a seeded shuffle
/// per epoch. ValidationError on an empty training set.
SoftmaxRegression bow_lr_train(const std::vector<Instance>& train, const Vocabulary& vocab,
                               const BowTrainConfig& cfg);

}  // namespace rqa
