#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rqa/batching.hpp"
#include "rqa/embeddings.hpp"
#include "rqa/encoder.hpp"
#include "rqa/grad_check.hpp"
#include "rqa/tensor.hpp"

namespace rqa {

enum class Variant { SemiIan, IanPlus, LstmA, LstmAQ, BilstmA, BilstmAQ, BowLr, Rule };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);
bool is_neural(Variant v);
/// True for variants that see the question in some form ("A+Q" settings).
bool uses_question(Variant v);

struct ModelConfig {
  Variant variant = Variant::SemiIan;
  Task task = Task::TF;
  std::size_t hidden = 64;
  std::size_t word_dim = 300;
  RhoHotConfig lexical{1, 1.0};
  double rho_option = 1.0;  // option block shares lexical.k
  bool use_extra_embedding = true;
  CandidateActivation candidate = CandidateActivation::Tanh;
  double dropout = 0.2;
  bool freeze_embeddings = false;

  RhoHotConfig option() const { return {lexical.k, rho_option}; }
  void validate() const;
  nlohmann::ordered_json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
};

/// Bilinear attention scorer between a hidden row and a pooling vector.
struct AttentionParams {
  Var W;  // [hidden width x pool width]
  Var b;  // [1]

  static AttentionParams init(std::size_t hidden_width, std::size_t pool_width, Rng& rng);
  std::vector<NamedParam> named(const std::string& prefix) const;
};

/// tanh(h W pool^T + b) per batch row; h is [B x w_h], pool [B x w_p]; result [B x 1].
Var score(Tape& tape, const Var& h, const Var& pool, const AttentionParams& params);

struct Attention {
  Var weights;  // [B x n]; zero at masked positions
  Var context;  // [B x width] = sum_t weights[:, t] * rows[t]
};

Attention attend(Tape& tape, const EncodedSequence& seq, const Var& pool, const AttentionParams& params);

/// Masked mean over positions, per batch row: [B x width].
Var pool_mean(Tape& tape, const EncodedSequence& seq);

using ClassProbs = std::array<double, kNumClasses>;

/// The neural classifiers. IAN+ and Semi-IAN run separate bi-LSTMs over
/// question and answer (sharing the word embedding table); the plain
/// variants encode the answer, or question followed by answer, and
/// mean-pool. For MC the question branch of IAN+/Semi-IAN carries option
/// embeddings in place of lexical ones.
class Model {
 public:
  Model(const ModelConfig& config, std::size_t vocab_size, Lexicon lexicon, Rng& rng,
        const EmbeddingTable* pretrained = nullptr);

  const ModelConfig& config() const { return config_; }
  const Lexicon& lexicon() const { return lexicon_; }
  std::size_t vocab_size() const { return vocab_size_; }

  /// Stable, named parameter list; also the checkpoint layout.
  std::vector<NamedParam> parameters() const;
  /// Parameters the optimizer updates (drops the embedding when frozen).
  std::vector<NamedParam> trainable() const;

  /// Class distribution [B x 3]. Dropout is applied on the head input only
  /// when a generator is supplied.
  Var forward(Tape& tape, const Batch& batch, Rng* dropout = nullptr) const;
  std::vector<ClassProbs> predict(const Batch& batch) const;

  std::size_t feature_width() const;
  std::size_t question_extra_width() const;
  std::size_t answer_extra_width() const;
  std::size_t joined_extra_width() const;

  // Building blocks, exposed for tests.
  std::vector<Var> question_extra(const Batch& batch) const;
  std::vector<Var> answer_extra(const Batch& batch) const;
  std::vector<Var> joined_extra(const Batch& batch) const;
  EncodedSequence encode_question(Tape& tape, const Batch& batch) const;
  EncodedSequence encode_answer(Tape& tape, const Batch& batch) const;
  /// Semi-IAN after question pooling: attend over the answer with `q_avg`.
  Var semi_ian_from_pool(Tape& tape, const Batch& batch, const Var& q_avg, Rng* dropout = nullptr) const;
  Var classify(Tape& tape, const Var& feature, Rng* dropout) const;

 private:
  bool bidirectional() const;
  std::vector<Var> embed(Tape& tape, const PaddedSequence& seq) const;
  EncodedSequence encode(Tape& tape, const PaddedSequence& seq, const std::vector<Var>& extra,
                         const LSTMParams& fwd, const LSTMParams* bwd) const;

  ModelConfig config_;
  Lexicon lexicon_;
  std::size_t vocab_size_ = 0;

  Var embedding_;
  // IAN+/Semi-IAN
  LSTMParams q_fwd_, q_bwd_, a_fwd_, a_bwd_;
  AttentionParams att_answer_, att_question_;
  // plain variants
  LSTMParams enc_fwd_, enc_bwd_;
  Var head_W_, head_b_;
};

}  // namespace rqa
