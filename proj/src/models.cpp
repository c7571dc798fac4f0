#include "rqa/models.hpp"

#include <cmath>

#include "rqa/errors.hpp"

namespace rqa {

namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 8> kVariantNames = {{
    {Variant::SemiIan, "semi-ian"},
    {Variant::IanPlus, "ian-plus"},
    {Variant::LstmA, "lstm-a"},
    {Variant::LstmAQ, "lstm-aq"},
    {Variant::BilstmA, "bilstm-a"},
    {Variant::BilstmAQ, "bilstm-aq"},
    {Variant::BowLr, "bow-lr"},
    {Variant::Rule, "rule"},
}};

}  // namespace

std::string_view variant_name(Variant v) {
  for (const auto& [var, name] : kVariantNames)
    if (var == v) return name;
  return "?";
}

Variant parse_variant(std::string_view name) {
  for (const auto& [var, n] : kVariantNames)
    if (n == name) return var;
  throw UsageError("unknown model '" + std::string(name) + "'");
}

bool is_neural(Variant v) { return v != Variant::BowLr && v != Variant::Rule; }

bool uses_question(Variant v) {
  return v == Variant::SemiIan || v == Variant::IanPlus || v == Variant::LstmAQ || v == Variant::BilstmAQ;
}

void ModelConfig::validate() const {
  if (hidden == 0) throw ValidationError("hidden size must be >= 1");
  if (word_dim == 0) throw ValidationError("word embedding dimension must be >= 1");
  lexical.validate();
  option().validate();
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("dropout must lie in [0, 1)");
}

nlohmann::ordered_json ModelConfig::to_json() const {
  nlohmann::ordered_json j;
  j["variant"] = variant_name(variant);
  j["task"] = task_name(task);
  j["hidden"] = hidden;
  j["word_dim"] = word_dim;
  j["k"] = lexical.k;
  j["rho_lex"] = lexical.rho;
  j["rho_opt"] = rho_option;
  j["use_extra_embedding"] = use_extra_embedding;
  j["candidate"] = candidate_name(candidate);
  j["dropout"] = dropout;
  j["freeze_embeddings"] = freeze_embeddings;
  return j;
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.variant = parse_variant(j.at("variant").get<std::string>());
    c.task = parse_task(j.at("task").get<std::string>());
    c.hidden = j.at("hidden").get<std::size_t>();
    c.word_dim = j.at("word_dim").get<std::size_t>();
    c.lexical.k = j.at("k").get<std::size_t>();
    c.lexical.rho = j.at("rho_lex").get<double>();
    c.rho_option = j.at("rho_opt").get<double>();
    c.use_extra_embedding = j.at("use_extra_embedding").get<bool>();
    c.candidate = parse_candidate(j.at("candidate").get<std::string>());
    c.dropout = j.at("dropout").get<double>();
    c.freeze_embeddings = j.value("freeze_embeddings", false);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model config: ") + e.what());
  }
  return c;
}

AttentionParams AttentionParams::init(std::size_t hidden_width, std::size_t pool_width, Rng& rng) {
  AttentionParams p;
  p.W = zeros({hidden_width, pool_width}, true);
  const double r = 1.0 / std::sqrt(static_cast<double>(pool_width));
  for (auto& v : p.W->data) v = rng.uniform(-r, r);
  p.b = zeros({1}, true);
  return p;
}

std::vector<NamedParam> AttentionParams::named(const std::string& prefix) const {
  return {{prefix + ".W", W}, {prefix + ".b", b}};
}

namespace {

// pool W^T, so that score rows reduce to a dot product with each hidden row.
Var project_pool(Tape& tape, const Var& pool, const AttentionParams& params) {
  if (pool->rank() != 2 || pool->cols() != params.W->shape[1]) {
    throw DimensionError("attention: pool " + shape_str(pool->shape) + " does not match W " +
                         shape_str(params.W->shape));
  }
  return matmul(tape, pool, transpose(tape, params.W));
}

Var score_projected(Tape& tape, const Var& h, const Var& projected, const Var& bias) {
  if (h->shape != projected->shape) {
    throw DimensionError("attention: hidden rows " + shape_str(h->shape) + " do not match W rows " +
                         shape_str(projected->shape));
  }
  return tanh(tape, add_row(tape, row_sum(tape, mul(tape, h, projected)), bias));
}

}  // namespace

Var score(Tape& tape, const Var& h, const Var& pool, const AttentionParams& params) {
  return score_projected(tape, h, project_pool(tape, pool, params), params.b);
}

Attention attend(Tape& tape, const EncodedSequence& seq, const Var& pool, const AttentionParams& params) {
  if (seq.length() == 0) throw EmptySupportError("attend: empty sequence");
  const Var projected = project_pool(tape, pool, params);
  std::vector<Var> scores;
  scores.reserve(seq.length());
  for (const auto& row : seq.rows) scores.push_back(score_projected(tape, row, projected, params.b));
  Attention out;
  out.weights = masked_softmax(tape, concat(tape, scores, 1), seq.batch_major_mask());
  for (std::size_t t = 0; t < seq.length(); ++t) {
    const Var term = scale_rows(tape, seq.rows[t], column(tape, out.weights, t));
    out.context = out.context ? add(tape, out.context, term) : term;
  }
  return out;
}

Var pool_mean(Tape& tape, const EncodedSequence& seq) {
  const std::size_t B = seq.batch(), n = seq.length();
  std::vector<double> counts(B, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t b = 0; b < B; ++b) counts[b] += seq.mask[t][b] ? 1.0 : 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    if (counts[b] == 0.0) throw EmptySupportError("pool_mean: sequence " + std::to_string(b) + " is fully masked");
  }
  Var total;
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<double> w(B);
    for (std::size_t b = 0; b < B; ++b) w[b] = seq.mask[t][b] ? 1.0 / counts[b] : 0.0;
    const Var term = scale_rows(tape, seq.rows[t], make_tensor({B, 1}, std::move(w)));
    total = total ? add(tape, total, term) : term;
  }
  return total;
}

// ---- Model -------------------------------------------------------------------

Model::Model(const ModelConfig& config, std::size_t vocab_size, Lexicon lexicon, Rng& rng,
             const EmbeddingTable* pretrained)
    : config_(config), lexicon_(std::move(lexicon)), vocab_size_(vocab_size) {
  if (!is_neural(config_.variant)) throw ValidationError("Model is for neural variants only");
  config_.validate();
  if (pretrained) {
    if (pretrained->dim != config_.word_dim || pretrained->rows() != vocab_size) {
      throw CompatibilityError("pretrained embeddings are " + std::to_string(pretrained->rows()) + " x " +
                               std::to_string(pretrained->dim) + ", model expects " +
                               std::to_string(vocab_size) + " x " + std::to_string(config_.word_dim));
    }
    embedding_ = make_tensor({vocab_size, config_.word_dim}, pretrained->data, true);
  } else {
    embedding_ = zeros({vocab_size, config_.word_dim}, true);
    for (std::size_t i = 2; i < vocab_size; ++i)
      for (std::size_t j = 0; j < config_.word_dim; ++j)
        embedding_->data[i * config_.word_dim + j] = rng.uniform(-kEmbeddingInitRange, kEmbeddingInitRange);
    Rng unk_rng(kUnkVectorSeed);
    if (vocab_size > Vocabulary::kUnk) {
      for (std::size_t j = 0; j < config_.word_dim; ++j)
        embedding_->data[Vocabulary::kUnk * config_.word_dim + j] =
            unk_rng.uniform(-kEmbeddingInitRange, kEmbeddingInitRange);
    }
  }
  if (config_.freeze_embeddings) embedding_->requires_grad = false;

  const std::size_t H = config_.hidden, d = config_.word_dim;
  const auto act = config_.candidate;
  switch (config_.variant) {
    case Variant::SemiIan:
    case Variant::IanPlus: {
      q_fwd_ = LSTMParams::init(H, d + question_extra_width(), rng, act);
      q_bwd_ = LSTMParams::init(H, d + question_extra_width(), rng, act);
      a_fwd_ = LSTMParams::init(H, d + answer_extra_width(), rng, act);
      a_bwd_ = LSTMParams::init(H, d + answer_extra_width(), rng, act);
      const std::size_t qw = 2 * H + question_extra_width(), aw = 2 * H + answer_extra_width();
      att_answer_ = AttentionParams::init(aw, qw, rng);
      if (config_.variant == Variant::IanPlus) att_question_ = AttentionParams::init(qw, aw, rng);
      break;
    }
    case Variant::LstmA:
    case Variant::BilstmA:
      enc_fwd_ = LSTMParams::init(H, d + answer_extra_width(), rng, act);
      if (bidirectional()) enc_bwd_ = LSTMParams::init(H, d + answer_extra_width(), rng, act);
      break;
    case Variant::LstmAQ:
    case Variant::BilstmAQ:
      enc_fwd_ = LSTMParams::init(H, d + joined_extra_width(), rng, act);
      if (bidirectional()) enc_bwd_ = LSTMParams::init(H, d + joined_extra_width(), rng, act);
      break;
    default:
      throw ValidationError("not a neural variant");
  }
  // Zero head: the untrained model predicts the uniform distribution.
  head_W_ = zeros({feature_width(), kNumClasses}, true);
  head_b_ = zeros({kNumClasses}, true);
}

bool Model::bidirectional() const {
  return config_.variant != Variant::LstmA && config_.variant != Variant::LstmAQ;
}

std::size_t Model::question_extra_width() const {
  if (!config_.use_extra_embedding) return 0;
  return config_.task == Task::MC ? config_.lexical.k : kNumLexClasses * config_.lexical.k;
}

std::size_t Model::answer_extra_width() const {
  return config_.use_extra_embedding ? kNumLexClasses * config_.lexical.k : 0;
}

std::size_t Model::joined_extra_width() const {
  if (!config_.use_extra_embedding) return 0;
  return kNumLexClasses * config_.lexical.k + (config_.task == Task::MC ? config_.lexical.k : 0);
}

std::size_t Model::feature_width() const {
  const std::size_t H = config_.hidden;
  switch (config_.variant) {
    case Variant::SemiIan:
      return 2 * H + answer_extra_width();
    case Variant::IanPlus:
      return 2 * H + question_extra_width() + 2 * H + answer_extra_width();
    case Variant::LstmA:
      return H + answer_extra_width();
    case Variant::BilstmA:
      return 2 * H + answer_extra_width();
    case Variant::LstmAQ:
      return H + joined_extra_width();
    case Variant::BilstmAQ:
      return 2 * H + joined_extra_width();
    default:
      return 0;
  }
}

std::vector<NamedParam> Model::parameters() const {
  std::vector<NamedParam> out{{"embedding", embedding_}};
  auto append = [&](std::vector<NamedParam> more) { out.insert(out.end(), more.begin(), more.end()); };
  switch (config_.variant) {
    case Variant::SemiIan:
    case Variant::IanPlus:
      append(q_fwd_.named("question.fwd"));
      append(q_bwd_.named("question.bwd"));
      append(a_fwd_.named("answer.fwd"));
      append(a_bwd_.named("answer.bwd"));
      append(att_answer_.named("attention.answer"));
      if (config_.variant == Variant::IanPlus) append(att_question_.named("attention.question"));
      break;
    default:
      append(enc_fwd_.named("encoder.fwd"));
      if (bidirectional()) append(enc_bwd_.named("encoder.bwd"));
      break;
  }
  out.emplace_back("head.W", head_W_);
  out.emplace_back("head.b", head_b_);
  return out;
}

std::vector<NamedParam> Model::trainable() const {
  auto all = parameters();
  if (config_.freeze_embeddings) all.erase(all.begin());
  return all;
}

namespace {

std::vector<Var> lexical_rows(const PaddedSequence& seq, const Lexicon& lexicon, const RhoHotConfig& cfg,
                              std::size_t width, std::size_t offset) {
  const std::size_t B = seq.tokens.size();
  std::vector<Var> out;
  out.reserve(seq.length);
  for (std::size_t t = 0; t < seq.length; ++t) {
    std::vector<double> data(B * width, 0.0);
    for (std::size_t b = 0; b < B && width > 0; ++b) {
      if (!seq.mask[t][b]) continue;
      const auto v = rho_hot_encode(seq.tokens[b][t], lexicon, cfg);
      std::copy(v.begin(), v.end(), data.begin() + static_cast<std::ptrdiff_t>(b * width + offset));
    }
    out.push_back(make_tensor({B, width}, std::move(data)));
  }
  return out;
}

// Writes option indicators into columns [offset, offset + k) of existing rows.
void add_option_rows(std::vector<Var>& rows, const PaddedSequence& seq, const std::vector<std::optional<Span>>& options,
                     const RhoHotConfig& cfg, std::size_t width, std::size_t offset) {
  const std::size_t B = seq.tokens.size();
  for (std::size_t t = 0; t < seq.length; ++t) {
    for (std::size_t b = 0; b < B; ++b) {
      if (!seq.mask[t][b] || !options[b]) continue;
      const auto v = option_encode(t, *options[b], cfg);
      std::copy(v.begin(), v.end(), rows[t]->data.begin() + static_cast<std::ptrdiff_t>(b * width + offset));
    }
  }
}

void require_options(const Batch& batch) {
  for (const auto& o : batch.options) {
    if (!o) throw ValidationError("multiple-choice model given an instance without an option span");
  }
}

}  // namespace

std::vector<Var> Model::question_extra(const Batch& batch) const {
  const std::size_t w = question_extra_width();
  if (config_.task == Task::TF || w == 0) return lexical_rows(batch.question, lexicon_, config_.lexical, w, 0);
  require_options(batch);
  // Lexical blocks are replaced by the option indicator in this branch.
  std::vector<Var> rows;
  const std::size_t B = batch.size();
  for (std::size_t t = 0; t < batch.question.length; ++t) rows.push_back(zeros({B, w}));
  add_option_rows(rows, batch.question, batch.options, config_.option(), w, 0);
  return rows;
}

std::vector<Var> Model::answer_extra(const Batch& batch) const {
  const std::size_t w = answer_extra_width();
  return lexical_rows(batch.answer, lexicon_, config_.lexical, w, 0);
}

std::vector<Var> Model::joined_extra(const Batch& batch) const {
  const std::size_t w = joined_extra_width();
  if (w == 0 || config_.task == Task::TF) return lexical_rows(batch.joined, lexicon_, config_.lexical, w, 0);
  require_options(batch);
  auto rows = lexical_rows(batch.joined, lexicon_, config_.lexical, w, 0);
  // Option spans index the question, which is the prefix of the joined sequence.
  add_option_rows(rows, batch.joined, batch.options, config_.option(), w, kNumLexClasses * config_.lexical.k);
  return rows;
}

std::vector<Var> Model::embed(Tape& tape, const PaddedSequence& seq) const {
  std::vector<Var> out;
  out.reserve(seq.length);
  for (std::size_t t = 0; t < seq.length; ++t) out.push_back(gather_rows(tape, embedding_, seq.ids[t]));
  return out;
}

EncodedSequence Model::encode(Tape& tape, const PaddedSequence& seq, const std::vector<Var>& extra,
                              const LSTMParams& fwd, const LSTMParams* bwd) const {
  const auto x = embed(tape, seq);
  return bwd ? bilstm_encode(tape, x, extra, seq.mask, fwd, *bwd) : lstm_encode(tape, x, extra, seq.mask, fwd);
}

EncodedSequence Model::encode_question(Tape& tape, const Batch& batch) const {
  if (config_.variant != Variant::SemiIan && config_.variant != Variant::IanPlus) {
    throw ValidationError("encode_question is defined for IAN+ and Semi-IAN only");
  }
  return encode(tape, batch.question, question_extra(batch), q_fwd_, &q_bwd_);
}

EncodedSequence Model::encode_answer(Tape& tape, const Batch& batch) const {
  if (config_.variant != Variant::SemiIan && config_.variant != Variant::IanPlus) {
    throw ValidationError("encode_answer is defined for IAN+ and Semi-IAN only");
  }
  return encode(tape, batch.answer, answer_extra(batch), a_fwd_, &a_bwd_);
}

Var Model::classify(Tape& tape, const Var& feature, Rng* dropout) const {
  Var input = feature;
  if (dropout && config_.dropout > 0.0) {
    const double keep = 1.0 - config_.dropout;
    std::vector<double> m(feature->size());
    for (auto& v : m) v = dropout->bernoulli(keep) ? 1.0 / keep : 0.0;
    input = mul(tape, feature, make_tensor(feature->shape, std::move(m)));
  }
  return softmax(tape, add_row(tape, matmul(tape, input, head_W_), head_b_));
}

Var Model::semi_ian_from_pool(Tape& tape, const Batch& batch, const Var& q_avg, Rng* dropout) const {
  const auto answer = encode_answer(tape, batch);
  return classify(tape, attend(tape, answer, q_avg, att_answer_).context, dropout);
}

Var Model::forward(Tape& tape, const Batch& batch, Rng* dropout) const {
  if (batch.size() == 0) throw ValidationError("forward: empty batch");
  const bool needs_question = uses_question(config_.variant);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const bool q_empty = std::none_of(batch.question.mask.begin(), batch.question.mask.end(),
                                      [b](const Mask& m) { return m[b]; });
    const bool a_empty = std::none_of(batch.answer.mask.begin(), batch.answer.mask.end(),
                                      [b](const Mask& m) { return m[b]; });
    if (a_empty || (needs_question && q_empty)) {
      throw ValidationError("forward: empty question or answer in batch row " + std::to_string(b));
    }
  }

  switch (config_.variant) {
    case Variant::SemiIan: {
      const auto question = encode_question(tape, batch);
      return semi_ian_from_pool(tape, batch, pool_mean(tape, question), dropout);
    }
    case Variant::IanPlus: {
      const auto question = encode_question(tape, batch);
      const auto answer = encode_answer(tape, batch);
      const Var q_avg = pool_mean(tape, question);
      const Var s_avg = pool_mean(tape, answer);
      const Var s_r = attend(tape, answer, q_avg, att_answer_).context;
      const Var q_r = attend(tape, question, s_avg, att_question_).context;
      return classify(tape, concat(tape, {q_r, s_r}, 1), dropout);
    }
    case Variant::LstmA:
    case Variant::BilstmA: {
      const auto enc = encode(tape, batch.answer, answer_extra(batch), enc_fwd_, bidirectional() ? &enc_bwd_ : nullptr);
      return classify(tape, pool_mean(tape, enc), dropout);
    }
    case Variant::LstmAQ:
    case Variant::BilstmAQ: {
      const auto enc = encode(tape, batch.joined, joined_extra(batch), enc_fwd_, bidirectional() ? &enc_bwd_ : nullptr);
      return classify(tape, pool_mean(tape, enc), dropout);
    }
    default:
      throw ValidationError("not a neural variant");
  }
}

std::vector<ClassProbs> Model::predict(const Batch& batch) const {
  Tape tape(false);
  const Var probs = forward(tape, batch, nullptr);
  std::vector<ClassProbs> out(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b)
    for (std::size_t c = 0; c < kNumClasses; ++c) out[b][c] = probs->data[b * kNumClasses + c];
  return out;
}

}  // namespace rqa
