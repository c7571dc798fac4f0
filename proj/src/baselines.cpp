#include "rqa/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "rqa/errors.hpp"
#include "rqa/random.hpp"

namespace rqa {

RuleTable RuleTable::from_json(const nlohmann::json& j) {
  RuleTable table;
  try {
    for (const auto& r : j.at("rules")) {
      Rule rule;
      for (const auto& k : r.at("keywords")) rule.keywords.insert(k.get<std::string>());
      rule.label = label_from_int(r.at("label").get<long long>());
      table.rules.push_back(std::move(rule));
    }
    if (j.contains("default_label")) table.default_label = label_from_int(j.at("default_label").get<long long>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("rule table: ") + e.what());
  }
  return table;
}

RuleTable RuleTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rule table: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("rule table " + path + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::ordered_json RuleTable::to_json() const {
  nlohmann::ordered_json j;
  j["rules"] = nlohmann::ordered_json::array();
  for (const auto& r : rules) {
    nlohmann::ordered_json rj;
    rj["keywords"] = std::vector<std::string>(r.keywords.begin(), r.keywords.end());
    rj["label"] = static_cast<int>(r.label);
    j["rules"].push_back(rj);
  }
  j["default_label"] = static_cast<int>(default_label);
  return j;
}

RuleTable RuleTable::starter() {
  RuleTable t;
  t.rules.push_back({{"no", "not", "never", "nope", "nah", "neither", "none"}, Label::False});
  t.rules.push_back({{"yes", "ok", "okay", "sure", "yeah", "yep", "certainly", "definitely", "absolutely",
                      "course", "right"},
                     Label::True});
  t.rules.push_back({{"maybe", "perhaps", "guess", "depends", "sometimes", "unsure"}, Label::Uncertain});
  t.default_label = Label::Uncertain;
  return t;
}

Label rule_classify(const Tokens& answer, const RuleTable& table) {
  for (const auto& rule : table.rules) {
    for (const auto& tok : answer) {
      if (rule.keywords.find(tok) != rule.keywords.end()) return rule.label;
    }
  }
  return table.default_label;
}

BowVector bow_vectorize(const Tokens& tokens, const Vocabulary& vocab) {
  std::map<std::size_t, double> counts;
  for (const auto& t : tokens) counts[vocab.index(t)] += 1.0;
  BowVector v;
  v.dim = vocab.size();
  v.entries.assign(counts.begin(), counts.end());
  return v;
}

std::string_view bow_input_name(BowInput m) { return m == BowInput::A ? "a" : "aq"; }

BowInput parse_bow_input(std::string_view name) {
  if (name == "a") return BowInput::A;
  if (name == "aq") return BowInput::AQ;
  throw UsageError("unknown BOW input mode '" + std::string(name) + "' (expected a or aq)");
}

Tokens bow_tokens(const Instance& inst, BowInput mode) {
  if (mode == BowInput::A) return inst.answer;
  Tokens t = inst.question;
  t.insert(t.end(), inst.answer.begin(), inst.answer.end());
  return t;
}

SoftmaxRegression::SoftmaxRegression(std::size_t dim, BowInput mode)
    : dim_(dim), mode_(mode), W_(dim * kNumClasses, 0.0) {}

ClassProbs SoftmaxRegression::predict(const BowVector& x) const {
  if (x.dim != dim_) {
    throw CompatibilityError("BOW vector of dimension " + std::to_string(x.dim) + " for a model of dimension " +
                             std::to_string(dim_));
  }
  std::array<double, kNumClasses> z{};
  for (std::size_t c = 0; c < kNumClasses; ++c) z[c] = b_[c];
  for (const auto& [idx, count] : x.entries)
    for (std::size_t c = 0; c < kNumClasses; ++c) z[c] += W_[idx * kNumClasses + c] * count;
  const double mx = *std::max_element(z.begin(), z.end());
  ClassProbs p{};
  double total = 0.0;
  for (std::size_t c = 0; c < kNumClasses; ++c) total += p[c] = std::exp(z[c] - mx);
  for (auto& v : p) v /= total;
  return p;
}

ClassProbs SoftmaxRegression::predict(const Instance& inst, const Vocabulary& vocab) const {
  return predict(bow_vectorize(bow_tokens(inst, mode_), vocab));
}

SoftmaxRegression bow_lr_train(const std::vector<Instance>& train, const Vocabulary& vocab,
                               const BowTrainConfig& cfg) {
  if (train.empty()) throw ValidationError("bow_lr_train: empty training set");
  if (cfg.batch_size == 0) throw ValidationError("bow_lr_train: batch size must be >= 1");
  std::vector<BowVector> xs;
  xs.reserve(train.size());
  for (const auto& inst : train) xs.push_back(bow_vectorize(bow_tokens(inst, cfg.mode), vocab));

  SoftmaxRegression model(vocab.size(), cfg.mode);
  auto& W = model.weights();
  auto& b = model.bias();
  Rng rng(cfg.seed);
  std::vector<double> gW(W.size(), 0.0);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const auto& idx : batch_indices(train.size(), cfg.batch_size, &rng)) {
      std::fill(gW.begin(), gW.end(), 0.0);
      std::array<double, kNumClasses> gb{};
      std::vector<std::size_t> touched;
      for (auto i : idx) {
        const auto p = model.predict(xs[i]);
        const auto y = static_cast<std::size_t>(train[i].label);
        for (std::size_t c = 0; c < kNumClasses; ++c) {
          const double d = p[c] - (c == y ? 1.0 : 0.0);
          gb[c] += d;
          for (const auto& [f, count] : xs[i].entries) gW[f * kNumClasses + c] += d * count;
        }
        for (const auto& e : xs[i].entries) touched.push_back(e.first);
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      const double step = cfg.lr / static_cast<double>(idx.size());
      // L2 is applied to the features present in the batch (lazy regularization).
      for (auto f : touched) {
        for (std::size_t c = 0; c < kNumClasses; ++c) {
          const std::size_t k = f * kNumClasses + c;
          W[k] -= step * gW[k] + cfg.lr * cfg.l2 * W[k];
        }
      }
      for (std::size_t c = 0; c < kNumClasses; ++c) b[c] -= step * gb[c];
    }
  }
  return model;
}

}  // namespace rqa
