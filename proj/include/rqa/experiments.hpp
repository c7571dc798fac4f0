#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rqa/train.hpp"

namespace rqa {

struct GridPoint {
  std::size_t k = 1;
  double rho_lex = 1.0;
  std::optional<double> rho_opt;  // MC only
};

/// Grid in k-major order: k x rho_lex (TF), k x rho_lex x rho_opt (MC).
/// With cfg.grid_subsample > 0, a seeded subset kept in grid order.
std::vector<GridPoint> enumerate_grid(Task task, const TrainConfig& cfg);

struct GridResult {
  GridPoint point;
  bool ok = false;
  std::string error;  // set when training failed; the point is skipped in selection
  double heldout_accuracy = 0.0;
  std::optional<double> test_accuracy;
};

struct GridReport {
  Variant variant = Variant::SemiIan;
  Task task = Task::TF;
  std::vector<GridResult> results;
  std::optional<std::size_t> best;  // highest held-out accuracy, first in grid order on ties

  std::string to_tsv() const;
};

/// Trains one model per grid point (concurrently with cfg.jobs > 1; results
/// equal a serial run) and selects by held-out accuracy.
GridReport grid_search(const ModelConfig& base, const std::vector<Instance>& train_data,
                       const std::vector<Instance>* test_data, const TrainConfig& cfg, const Lexicon& lexicon);

struct AblationRow {
  std::string model;
  char setting = 'W';  // W: with lexical/option embedding, O: without
  double accuracy = 0.0;
  std::optional<double> exact_match;
  std::size_t test_size = 0;
  std::string test_split;  // fingerprint of the evaluated split
};

struct AblationReport {
  Task task = Task::TF;
  std::vector<AblationRow> rows;
  std::string to_tsv() const;
};

/// FNV-1a over group ids, option indices and gold labels.
std::string split_fingerprint(const std::vector<Instance>& instances);

/// For each model: a W and an O run with identical seeds, both evaluated on `test_data`.
AblationReport ablation(const std::vector<ModelConfig>& models, const std::vector<Instance>& train_data,
                        const std::vector<Instance>& test_data, const TrainConfig& cfg, const Lexicon& lexicon);

/// Fixed-precision number formatting shared by the TSV reports.
std::string format_accuracy(double v);

}  // namespace rqa
