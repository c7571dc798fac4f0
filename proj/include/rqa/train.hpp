#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rqa/baselines.hpp"
#include "rqa/batching.hpp"
#include "rqa/checkpoint.hpp"
#include "rqa/models.hpp"
#include "rqa/optim.hpp"

namespace rqa {

std::vector<std::size_t> default_grid_k();
std::vector<double> default_grid_rho();  // 0.1, 0.2, ..., 1.0

struct TrainConfig {
  double lr = 1e-3;
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  OptimizerKind optimizer = OptimizerKind::Adam;
  std::size_t patience = 0;  // epochs without held-out improvement before stopping; 0 disables
  double holdout = 0.1;      // fraction of training groups held out for model selection
  std::size_t min_count = 2;

  std::vector<std::size_t> grid_k = default_grid_k();
  std::vector<double> grid_rho_lex = default_grid_rho();
  std::vector<double> grid_rho_opt = default_grid_rho();
  std::size_t grid_subsample = 0;  // evaluate this many seeded-random grid points; 0 = all
  std::size_t jobs = 1;

  // Baselines.
  BowInput bow_input = BowInput::A;
  double bow_lr = 0.5;
  RuleTable rules = RuleTable::starter();

  std::optional<std::string> embeddings_path;

  void validate() const;
  nlohmann::ordered_json to_json() const;
};

/// Confusion counts indexed [gold][predicted].
struct Metrics {
  std::array<std::array<std::size_t, kNumClasses>, kNumClasses> confusion{};

  static Metrics from(const std::vector<Label>& gold, const std::vector<Label>& predicted);
  std::size_t total() const;
  std::size_t correct() const;
  double accuracy() const;        // trace / total; 0 for an empty set
  double precision(Label c) const;  // 0 when nothing was predicted as c
  double recall(Label c) const;     // 0 when c never occurs
  nlohmann::ordered_json to_json() const;
  bool operator==(const Metrics& o) const { return confusion == o.confusion; }
};

struct EvalReport {
  Task task = Task::TF;
  Metrics metrics;                    // per example (TF) or per option subtask (MC)
  std::optional<double> exact_match;  // MC only: aggregated final label equals the gold one
  std::size_t questions = 0;

  nlohmann::ordered_json to_json() const;
  bool operator==(const EvalReport& o) const {
    return task == o.task && metrics == o.metrics && exact_match == o.exact_match && questions == o.questions;
  }
};

/// Per-option labels regrouped by `group` in first-seen order.
std::vector<std::vector<Label>> group_labels(const std::vector<Instance>& instances, const std::vector<Label>& labels);

EvalReport evaluate(const Checkpoint& ckpt, const std::vector<Instance>& instances);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  std::optional<double> heldout_accuracy;
};
using EpochCallback = std::function<void(const EpochLog&)>;

/// Seeded group-level split: returns (fit, held-out). Groups keep all their
/// option subtasks together. Nothing is held out for fewer than two groups.
std::pair<std::vector<Instance>, std::vector<Instance>> holdout_split(const std::vector<Instance>& instances,
                                                                      double fraction, std::uint64_t seed);

/// Vocabulary over question and answer tokens.
Vocabulary build_vocab(const std::vector<Instance>& instances, std::size_t min_count);

/// Trains `model_config` on `data` (pre-transformed instances for MC).
/// Minimizes mean cross-entropy with early stopping on held-out accuracy and
/// returns the best-epoch checkpoint. TrainingError if the loss turns NaN.
Checkpoint train(const ModelConfig& model_config, const std::vector<Instance>& data, const TrainConfig& cfg,
                 const Lexicon& lexicon, const EpochCallback& on_epoch = {});

}  // namespace rqa
