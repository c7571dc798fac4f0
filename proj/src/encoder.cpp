#include "rqa/encoder.hpp"

#include <cmath>

#include "rqa/errors.hpp"

namespace rqa {

void RhoHotConfig::validate() const {
  if (k < 1) throw ValidationError("rho-hot block size k must be >= 1");
  if (!(rho > 0.0 && rho <= 1.0)) throw ValidationError("rho must lie in (0, 1], got " + std::to_string(rho));
}

std::vector<double> rho_hot_encode(std::string_view token, const Lexicon& lexicon, const RhoHotConfig& cfg) {
  std::vector<double> out(kNumLexClasses * cfg.k, 0.0);
  const auto classes = lexicon.classes_of(token);
  for (std::size_t c = 0; c < kNumLexClasses; ++c) {
    if (!classes.test(c)) continue;
    std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(c * cfg.k), cfg.k, cfg.rho);
  }
  return out;
}

std::vector<double> option_encode(std::size_t position, const Span& option, const RhoHotConfig& cfg) {
  return std::vector<double>(cfg.k, option.contains(position) ? cfg.rho : 0.0);
}

std::string_view candidate_name(CandidateActivation a) {
  return a == CandidateActivation::Tanh ? "tanh" : "sigmoid";
}

CandidateActivation parse_candidate(std::string_view name) {
  if (name == "tanh") return CandidateActivation::Tanh;
  if (name == "sigmoid") return CandidateActivation::Sigmoid;
  throw ValidationError("unknown candidate activation '" + std::string(name) + "'");
}

LSTMParams LSTMParams::zeros(std::size_t hidden, std::size_t input_width, CandidateActivation candidate) {
  LSTMParams p;
  p.hidden = hidden;
  p.input_width = input_width;
  p.candidate = candidate;
  const std::size_t rows = 2 * hidden + input_width;
  for (Var* w : {&p.W_i, &p.W_f, &p.W_o, &p.W_d}) *w = rqa::zeros({rows, hidden}, true);
  for (Var* b : {&p.b_i, &p.b_f, &p.b_o, &p.b_d}) *b = rqa::zeros({hidden}, true);
  return p;
}

LSTMParams LSTMParams::init(std::size_t hidden, std::size_t input_width, Rng& rng,
                            CandidateActivation candidate) {
  LSTMParams p = zeros(hidden, input_width, candidate);
  const double r = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (Var* w : {&p.W_i, &p.W_f, &p.W_o, &p.W_d})
    for (auto& v : (*w)->data) v = rng.uniform(-r, r);
  std::fill(p.b_f->data.begin(), p.b_f->data.end(), 1.0);
  return p;
}

std::vector<NamedParam> LSTMParams::named(const std::string& prefix) const {
  return {{prefix + ".W_i", W_i}, {prefix + ".b_i", b_i}, {prefix + ".W_f", W_f}, {prefix + ".b_f", b_f},
          {prefix + ".W_o", W_o}, {prefix + ".b_o", b_o}, {prefix + ".W_d", W_d}, {prefix + ".b_d", b_d}};
}

LSTMState lstm_step(Tape& tape, const LSTMParams& p, const Var& c_prev, const Var& h_prev, const Var& x,
                    const Var& l) {
  const std::size_t B = x->rows();
  if (c_prev->shape != Shape{B, p.hidden} || h_prev->shape != Shape{B, p.hidden}) {
    throw DimensionError("lstm_step: state shapes " + shape_str(c_prev->shape) + ", " +
                         shape_str(h_prev->shape) + " do not match hidden size " + std::to_string(p.hidden));
  }
  if (x->rank() != 2 || l->rank() != 2 || l->rows() != B || x->cols() + l->cols() != p.input_width) {
    throw DimensionError("lstm_step: inputs " + shape_str(x->shape) + " + " + shape_str(l->shape) +
                         " do not match input width " + std::to_string(p.input_width));
  }
  const Var z = concat(tape, {c_prev, h_prev, x, l}, 1);
  const Var i = sigmoid(tape, add_row(tape, matmul(tape, z, p.W_i), p.b_i));
  const Var f = sigmoid(tape, add_row(tape, matmul(tape, z, p.W_f), p.b_f));
  const Var d_pre = add_row(tape, matmul(tape, z, p.W_d), p.b_d);
  const Var d = p.candidate == CandidateActivation::Tanh ? tanh(tape, d_pre) : sigmoid(tape, d_pre);
  const Var c = add(tape, mul(tape, i, d), mul(tape, f, c_prev));
  const Var z_o = concat(tape, {c, h_prev, x, l}, 1);
  const Var o = sigmoid(tape, add_row(tape, matmul(tape, z_o, p.W_o), p.b_o));
  const Var h = mul(tape, o, tanh(tape, c));
  return {c, h};
}

Mask EncodedSequence::batch_major_mask() const {
  const std::size_t n = length(), B = batch();
  Mask out(B * n);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < n; ++t) out[b * n + t] = mask[t][b];
  return out;
}

Var EncodedSequence::matrix(Tape& tape) const {
  if (batch() != 1) throw DimensionError("EncodedSequence::matrix requires a single sequence");
  return concat(tape, rows, 0);
}

namespace {

void check_inputs(const std::vector<Var>& x, const std::vector<Var>& l, const std::vector<Mask>& mask) {
  if (x.size() != l.size() || x.size() != mask.size()) {
    throw DimensionError("encoder: " + std::to_string(x.size()) + " embeddings, " + std::to_string(l.size()) +
                         " lexical vectors, " + std::to_string(mask.size()) + " mask entries");
  }
  if (x.empty()) throw EmptySupportError("encoder: empty sequence");
  const std::size_t B = x.front()->rows();
  for (std::size_t b = 0; b < B; ++b) {
    bool any = false;
    for (const auto& m : mask) {
      if (m.size() != B) throw DimensionError("encoder: mask width does not match batch");
      any = any || m[b];
    }
    if (!any) throw EmptySupportError("encoder: sequence " + std::to_string(b) + " is fully masked");
  }
}

// Runs one direction; returns hidden states per position in input order.
std::vector<Var> run_direction(Tape& tape, const std::vector<Var>& x, const std::vector<Var>& l,
                               const std::vector<Mask>& mask, const LSTMParams& p, bool reverse) {
  const std::size_t n = x.size(), B = x.front()->rows();
  Var c = rqa::zeros({B, p.hidden});
  Var h = rqa::zeros({B, p.hidden});
  std::vector<Var> hs(n);
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t t = reverse ? n - 1 - s : s;
    auto next = lstm_step(tape, p, c, h, x[t], l[t]);
    c = where_rows(tape, mask[t], next.c, c);
    h = where_rows(tape, mask[t], next.h, h);
    hs[t] = h;
  }
  return hs;
}

EncodedSequence assemble(Tape& tape, const std::vector<std::vector<Var>>& directions, const std::vector<Var>& l,
                         const std::vector<Mask>& mask) {
  EncodedSequence out;
  out.mask = mask;
  const std::size_t n = l.size();
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<Var> parts;
    for (const auto& dir : directions) parts.push_back(dir[t]);
    parts.push_back(l[t]);
    const Var row = concat(tape, parts, 1);
    out.rows.push_back(where_rows(tape, mask[t], row, rqa::zeros(row->shape)));
  }
  out.width = out.rows.front()->cols();
  return out;
}

}  // namespace

EncodedSequence bilstm_encode(Tape& tape, const std::vector<Var>& x, const std::vector<Var>& l,
                              const std::vector<Mask>& mask, const LSTMParams& fwd, const LSTMParams& bwd) {
  check_inputs(x, l, mask);
  auto hf = run_direction(tape, x, l, mask, fwd, false);
  auto hb = run_direction(tape, x, l, mask, bwd, true);
  return assemble(tape, {hf, hb}, l, mask);
}

EncodedSequence lstm_encode(Tape& tape, const std::vector<Var>& x, const std::vector<Var>& l,
                            const std::vector<Mask>& mask, const LSTMParams& fwd) {
  check_inputs(x, l, mask);
  auto hf = run_direction(tape, x, l, mask, fwd, false);
  return assemble(tape, {hf}, l, mask);
}

}  // namespace rqa
