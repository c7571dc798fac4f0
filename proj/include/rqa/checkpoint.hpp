#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "rqa/baselines.hpp"
#include "rqa/batching.hpp"
#include "rqa/models.hpp"
#include "rqa/text.hpp"

namespace rqa {

inline constexpr int kCheckpointFormatVersion = 1;

struct TrainMeta {
  std::uint64_t seed = 0;
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;  // 1-based; 0 when no held-out selection happened
  double best_heldout_accuracy = 0.0;
  std::vector<double> epoch_loss;
  std::vector<double> heldout_accuracy;
  nlohmann::ordered_json train_config = nlohmann::ordered_json::object();
  nlohmann::ordered_json final_metrics = nlohmann::ordered_json::object();

  nlohmann::ordered_json to_json() const;
  static TrainMeta from_json(const nlohmann::ordered_json& j);
};

/// A trained classifier of any variant plus everything needed to rebuild it.
/// Exactly one of `model` (neural), `bow` (bow-lr) or `rules` (rule) is live.
struct Checkpoint {
  ModelConfig config;
  Vocabulary vocab;
  Lexicon lexicon;
  std::shared_ptr<Model> model;
  SoftmaxRegression bow;
  RuleTable rules = RuleTable::starter();
  TrainMeta meta;

  /// Class distributions in input order; neural models run in fixed-size,
  /// unshuffled batches.
  std::vector<ClassProbs> predict_probs(const std::vector<Instance>& instances, std::size_t batch_size = 64) const;
  std::vector<Label> predict(const std::vector<Instance>& instances, std::size_t batch_size = 64) const;

  /// Named arrays in checkpoint order (model parameters, or bow.W / bow.b).
  std::vector<NamedParam> parameters() const;
};

/// Highest class probability; ties resolve to the lower label.
Label argmax_label(const ClassProbs& p);

nlohmann::ordered_json checkpoint_to_json(const Checkpoint& ckpt);
/// UnsupportedVersionError on a foreign format_version; FormatError on a
/// structurally invalid document.
Checkpoint checkpoint_from_json(const nlohmann::ordered_json& j);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
/// IoError if unreadable, ParseError if the JSON is malformed or truncated.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace rqa
