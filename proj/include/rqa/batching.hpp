#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rqa/dataset.hpp"
#include "rqa/mc_pipeline.hpp"
#include "rqa/random.hpp"
#include "rqa/tensor.hpp"
#include "rqa/text.hpp"

namespace rqa {

/// A single 3-class classification problem: a T/F example, or one option
/// subtask of an MC example. `group` is the source example id.
struct Instance {
  std::string group;
  std::size_t option_index = 0;
  std::size_t num_options = 1;
  Tokens question;
  Tokens answer;
  std::optional<Span> option;
  Label label = Label::Uncertain;
};

std::vector<Instance> to_instances(const std::vector<TFExample>& examples);
std::vector<Instance> to_instances(const std::vector<MCExample>& examples);
Instance to_instance(const OptionSubtask& subtask);

/// Right-padded, time-major token batch.
struct PaddedSequence {
  std::size_t length = 0;
  std::vector<Tokens> tokens;                  // [b][t], padded with the PAD token
  std::vector<std::vector<std::size_t>> ids;   // [t][b]
  std::vector<Mask> mask;                      // [t][b], true on the real-token prefix
};

PaddedSequence pad_sequences(const std::vector<const Tokens*>& seqs, const Vocabulary& vocab);

struct Batch {
  std::vector<std::size_t> indices;  // positions in the source instance list
  PaddedSequence question;
  PaddedSequence answer;
  PaddedSequence joined;  // question tokens followed by answer tokens
  std::vector<std::optional<Span>> options;
  std::vector<std::size_t> labels;

  std::size_t size() const { return indices.size(); }
};

Batch make_batch(const std::vector<Instance>& instances, const std::vector<std::size_t>& indices,
                 const Vocabulary& vocab);

/// Index groups of at most `batch_size`; shuffled with `rng` when given.
std::vector<std::vector<std::size_t>> batch_indices(std::size_t n, std::size_t batch_size, Rng* rng);

/// Seeded shuffle + padding. Call once per epoch with the same generator.
std::vector<Batch> make_batches(const std::vector<Instance>& instances, std::size_t batch_size,
                                const Vocabulary& vocab, Rng* rng);

}  // namespace rqa
