#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rqa/dataset.hpp"
#include "rqa/grad_check.hpp"
#include "rqa/random.hpp"
#include "rqa/tensor.hpp"
#include "rqa/text.hpp"

namespace rqa {

/// rho-hot block encoding: `k` slots per class, active slots hold `rho`.
struct RhoHotConfig {
  std::size_t k = 1;
  double rho = 1.0;

  void validate() const;  // k >= 1, 0 < rho <= 1
};

/// 6k-wide lexical vector; block j is filled with rho iff the token is in class j.
std::vector<double> rho_hot_encode(std::string_view token, const Lexicon& lexicon, const RhoHotConfig& cfg);

/// k-wide option indicator: rho everywhere if `position` lies in `option`.
std::vector<double> option_encode(std::size_t position, const Span& option, const RhoHotConfig& cfg);

enum class CandidateActivation { Tanh, Sigmoid };

std::string_view candidate_name(CandidateActivation a);
CandidateActivation parse_candidate(std::string_view name);

/// One LSTM direction. Every weight matrix reads the concatenation
/// [c, h_prev, x, l] (stored input-major, so rows = 2H + input_width and
/// columns = H). The output gate reads the *current* cell state c_t; the
/// other gates read c_{t-1}.
struct LSTMParams {
  Var W_i, W_f, W_o, W_d;
  Var b_i, b_f, b_o, b_d;
  std::size_t hidden = 0;
  std::size_t input_width = 0;  // word + extra embedding width
  CandidateActivation candidate = CandidateActivation::Tanh;

  /// Weights uniform(-1/sqrt(H), 1/sqrt(H)); biases zero except forget = 1.
  static LSTMParams init(std::size_t hidden, std::size_t input_width, Rng& rng,
                         CandidateActivation candidate = CandidateActivation::Tanh);
  static LSTMParams zeros(std::size_t hidden, std::size_t input_width,
                          CandidateActivation candidate = CandidateActivation::Tanh);

  std::vector<NamedParam> named(const std::string& prefix) const;
};

struct LSTMState {
  Var c;
  Var h;
};

/// One step over a batch: c_prev, h_prev are [B x H]; x is [B x d_word] and
/// l is [B x d_extra] (d_extra may be zero).
///   i = s(W_i z + b_i), f = s(W_f z + b_f), d = act(W_d z + b_d)  with z = [c_prev, h_prev, x, l]
///   c = i * d + f * c_prev
///   o = s(W_o [c, h_prev, x, l] + b_o),  h = o * tanh(c)
LSTMState lstm_step(Tape& tape, const LSTMParams& p, const Var& c_prev, const Var& h_prev, const Var& x,
                    const Var& l);

/// Per-token outputs for a batch, time-major. rows[t] is [B x width]; rows
/// at masked positions are exactly zero.
struct EncodedSequence {
  std::vector<Var> rows;
  std::vector<Mask> mask;  // mask[t][b]
  std::size_t width = 0;

  std::size_t length() const { return rows.size(); }
  std::size_t batch() const { return rows.empty() ? 0 : rows.front()->rows(); }
  /// Flattened [b][t] mask, matching a [B x n] score matrix.
  Mask batch_major_mask() const;
  /// For a single sequence (B = 1): the n x width matrix.
  Var matrix(Tape& tape) const;
};

/// Bidirectional encoding; output rows are [h_fwd; h_bwd; l_t]. The
/// backward LSTM consumes the sequence reversed. At masked positions the
/// recurrent state passes through unchanged.
EncodedSequence bilstm_encode(Tape& tape, const std::vector<Var>& x, const std::vector<Var>& l,
                              const std::vector<Mask>& mask, const LSTMParams& fwd, const LSTMParams& bwd);

/// Left-to-right only; output rows are [h_fwd; l_t].
EncodedSequence lstm_encode(Tape& tape, const std::vector<Var>& x, const std::vector<Var>& l,
                            const std::vector<Mask>& mask, const LSTMParams& fwd);

}  // namespace rqa
