#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rqa/encoder.hpp"
#include "rqa/errors.hpp"
#include "rqa/grad_check.hpp"

using namespace rqa;

namespace {

Lexicon tiny_lexicon() {
  Lexicon lex;
  lex.add(LexClass::Affirmative, "yes");
  lex.add(LexClass::Privative, "no");
  lex.add(LexClass::Negative, "no");
  lex.add(LexClass::Supposed, "maybe");
  return lex;
}

oracle::LstmWeights to_oracle(const LSTMParams& p) {
  oracle::LstmWeights w;
  w.H = p.hidden;
  w.in = p.input_width;
  w.Wi = p.W_i->data, w.Wf = p.W_f->data, w.Wo = p.W_o->data, w.Wd = p.W_d->data;
  w.bi = p.b_i->data, w.bf = p.b_f->data, w.bo = p.b_o->data, w.bd = p.b_d->data;
  w.sigmoid_candidate = p.candidate == CandidateActivation::Sigmoid;
  return w;
}

// Random single-sequence inputs split into word [1 x dx] and extra [1 x dl] rows.
struct SeqInput {
  std::vector<Var> x, l;
  std::vector<Mask> mask;
  oracle::Matrix joined;
};

SeqInput random_seq(Rng& rng, std::size_t n, std::size_t dx, std::size_t dl) {
  SeqInput s;
  for (std::size_t t = 0; t < n; ++t) {
    auto xv = oracle::random_vector(rng, dx), lv = oracle::random_vector(rng, dl);
    s.x.push_back(make_tensor({1, dx}, xv));
    s.l.push_back(make_tensor({1, dl}, lv));
    s.mask.push_back({true});
    xv.insert(xv.end(), lv.begin(), lv.end());
    s.joined.push_back(xv);
  }
  return s;
}

void randomize(const LSTMParams& p, Rng& rng, double r = 0.8) {
  for (const auto& [_, v] : p.named("p"))
    for (auto& x : v->data) x = rng.uniform(-r, r);
}

}  // namespace

TEST(RhoHot, Examples) {
  const auto lex = tiny_lexicon();
  const auto v = rho_hot_encode("no", lex, {2, 0.5});
  EXPECT_EQ(v, (std::vector<double>{0, 0, 0.5, 0.5, 0, 0, 0, 0, 0.5, 0.5, 0, 0}));
  EXPECT_EQ(rho_hot_encode("tea", lex, {3, 1.0}), std::vector<double>(18, 0.0));
  const auto y = rho_hot_encode("yes", lex, {1, 1.0});
  EXPECT_EQ(y, (std::vector<double>{1, 0, 0, 0, 0, 0}));
}

TEST(RhoHot, BlockStructureProperty) {
  const auto lex = Lexicon::starter();
  const std::vector<std::string> words = {"yes", "no", "maybe", "good", "bad", "think", "tea", "not", "sure"};
  for (std::size_t k : {1, 2, 4, 8, 16}) {
    for (int r = 1; r <= 10; ++r) {
      const RhoHotConfig cfg{k, r / 10.0};
      for (const auto& w : words) {
        const auto v = rho_hot_encode(w, lex, cfg);
        ASSERT_EQ(v.size(), 6 * k);
        const auto cls = lex.classes_of(w);
        for (std::size_t j = 0; j < 6; ++j)
          for (std::size_t s = 0; s < k; ++s) EXPECT_EQ(v[j * k + s], cls.test(j) ? cfg.rho : 0.0);
      }
    }
  }
}

TEST(RhoHot, ConfigValidation) {
  EXPECT_THROW((RhoHotConfig{0, 0.5}).validate(), ValidationError);
  EXPECT_THROW((RhoHotConfig{1, 0.0}).validate(), ValidationError);
  EXPECT_THROW((RhoHotConfig{1, 1.5}).validate(), ValidationError);
  EXPECT_NO_THROW((RhoHotConfig{16, 1.0}).validate());
}

TEST(OptionEncode, InsideAndOutsideSpan) {
  const Span sp{2, 4};
  EXPECT_EQ(option_encode(1, sp, {3, 0.4}), std::vector<double>(3, 0.0));
  EXPECT_EQ(option_encode(2, sp, {3, 0.4}), std::vector<double>(3, 0.4));
  EXPECT_EQ(option_encode(3, sp, {3, 0.4}), std::vector<double>(3, 0.4));
  EXPECT_EQ(option_encode(4, sp, {3, 0.4}), std::vector<double>(3, 0.0));
}

TEST(LstmInit, RangesAndForgetBias) {
  Rng rng(1);
  const auto p = LSTMParams::init(16, 10, rng);
  EXPECT_EQ(p.W_i->shape, (Shape{42, 16}));
  const double r = 0.25;
  for (const Var& w : {p.W_i, p.W_f, p.W_o, p.W_d})
    for (double v : w->data) {
      EXPECT_GE(v, -r);
      EXPECT_LE(v, r);
    }
  for (double v : p.b_f->data) EXPECT_EQ(v, 1.0);
  for (const Var& b : {p.b_i, p.b_o, p.b_d})
    for (double v : b->data) EXPECT_EQ(v, 0.0);
}

TEST(LstmStep, MatchesOracle) {
  Rng rng(2);
  for (auto cand : {CandidateActivation::Tanh, CandidateActivation::Sigmoid}) {
    for (int trial = 0; trial < 20; ++trial) {
      auto p = LSTMParams::init(5, 7, rng, cand);
      randomize(p, rng);
      const auto seq = random_seq(rng, 6, 4, 3);
      Tape tape(false);
      const auto enc = lstm_encode(tape, seq.x, seq.l, seq.mask, p);
      const auto ref = oracle::lstm_run(to_oracle(p), seq.joined);
      for (std::size_t t = 0; t < 6; ++t) {
        ASSERT_EQ(enc.rows[t]->cols(), 5u + 3u);
        for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(enc.rows[t]->data[j], ref[t][j], 1e-12);
        // The extra embedding is appended verbatim.
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(enc.rows[t]->data[5 + j], seq.l[t]->data[j]);
      }
    }
  }
}

TEST(LstmStep, OutputGateReadsCurrentCell) {
  // With only the c-rows of W_o non-zero, o depends on c_t, not c_{t-1}.
  Rng rng(3);
  auto p = LSTMParams::zeros(1, 1);
  p.W_i->data[2] = 1.0;   // x -> i
  p.W_d->data[2] = 2.0;   // x -> d
  p.W_o->data[0] = 3.0;   // c -> o
  Tape tape(false);
  const auto s = lstm_step(tape, p, zeros({1, 1}), zeros({1, 1}), make_tensor({1, 1}, {1.0}), zeros({1, 0}));
  const double i = oracle::sigmoid(1.0), d = std::tanh(2.0), f = oracle::sigmoid(0.0);
  const double c = i * d + f * 0.0;
  EXPECT_NEAR(s.c->data[0], c, 1e-14);
  EXPECT_NEAR(s.h->data[0], oracle::sigmoid(3.0 * c) * std::tanh(c), 1e-14);
}

TEST(LstmStep, ClosedFormCases) {
  Tape tape(false);
  const auto zero = zeros({1, 2});
  auto tanh_zero = LSTMParams::zeros(2, 3);
  auto s = lstm_step(tape, tanh_zero, zero, zero, zeros({1, 3}), zeros({1, 0}));
  for (double x : s.c->data) EXPECT_EQ(x, 0.0);
  for (double x : s.h->data) EXPECT_EQ(x, 0.0);

  // sigmoid candidate: c = 0.5 * 0.5, h = 0.5 * tanh(0.25)
  auto sig = LSTMParams::zeros(2, 3, CandidateActivation::Sigmoid);
  s = lstm_step(tape, sig, zero, zero, zeros({1, 3}), zeros({1, 0}));
  for (double x : s.c->data) EXPECT_NEAR(x, 0.25, 1e-15);
  for (double x : s.h->data) EXPECT_NEAR(x, 0.12246, 1e-5);

  // saturated candidate bias
  auto sat = LSTMParams::zeros(2, 3);
  for (auto& b : sat.b_d->data) b = 50.0;
  s = lstm_step(tape, sat, zero, zero, zeros({1, 3}), zeros({1, 0}));
  for (double x : s.c->data) EXPECT_NEAR(x, 0.5, 1e-15);
  for (double x : s.h->data) EXPECT_NEAR(x, 0.23105, 1e-5);
}

TEST(LstmStep, ShapeErrors) {
  Rng rng(4);
  const auto p = LSTMParams::init(3, 4, rng);
  Tape tape;
  EXPECT_THROW(lstm_step(tape, p, zeros({1, 2}), zeros({1, 3}), zeros({1, 4}), zeros({1, 0})), DimensionError);
  EXPECT_THROW(lstm_step(tape, p, zeros({1, 3}), zeros({1, 3}), zeros({1, 3}), zeros({1, 0})), DimensionError);
}

TEST(Bilstm, BackwardDirectionMatchesReversedOracle) {
  Rng rng(5);
  auto f = LSTMParams::init(4, 5, rng), b = LSTMParams::init(4, 5, rng);
  randomize(f, rng);
  randomize(b, rng);
  const auto seq = random_seq(rng, 5, 3, 2);
  Tape tape(false);
  const auto enc = bilstm_encode(tape, seq.x, seq.l, seq.mask, f, b);
  ASSERT_EQ(enc.width, 4u + 4u + 2u);
  oracle::Matrix rev(seq.joined.rbegin(), seq.joined.rend());
  const auto ref_f = oracle::lstm_run(to_oracle(f), seq.joined);
  const auto ref_b = oracle::lstm_run(to_oracle(b), rev);
  for (std::size_t t = 0; t < 5; ++t)
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_NEAR(enc.rows[t]->data[j], ref_f[t][j], 1e-12);
      EXPECT_NEAR(enc.rows[t]->data[4 + j], ref_b[4 - t][j], 1e-12);
    }
}

TEST(Bilstm, SingleTokenBothDirectionsAgree) {
  Rng rng(8);
  const auto p = LSTMParams::init(4, 3, rng);
  Tape tape(false);
  const auto x = make_tensor({2, 3}, oracle::random_vector(rng, 6));
  const auto enc = bilstm_encode(tape, {x}, {zeros({2, 0})}, {{true, true}}, p, p);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t j = 0; j < 4; ++j)
      EXPECT_EQ(enc.rows[0]->data[b * 8 + j], enc.rows[0]->data[b * 8 + 4 + j]);
}

TEST(Bilstm, PaddingDoesNotChangeRealPositions) {
  Rng rng(6);
  auto f = LSTMParams::init(3, 4, rng), b = LSTMParams::init(3, 4, rng);
  randomize(f, rng);
  randomize(b, rng);
  const auto seq = random_seq(rng, 4, 3, 1);
  Tape t1(false);
  const auto plain = bilstm_encode(t1, seq.x, seq.l, seq.mask, f, b);
  // Same sequence padded with garbage to length 7.
  auto padded = seq;
  for (int i = 0; i < 3; ++i) {
    padded.x.push_back(make_tensor({1, 3}, oracle::random_vector(rng, 3, -5, 5)));
    padded.l.push_back(make_tensor({1, 1}, {9.0}));
    padded.mask.push_back({false});
  }
  Tape t2(false);
  const auto enc = bilstm_encode(t2, padded.x, padded.l, padded.mask, f, b);
  for (std::size_t t = 0; t < 4; ++t)
    for (std::size_t j = 0; j < plain.width; ++j) EXPECT_EQ(enc.rows[t]->data[j], plain.rows[t]->data[j]);
  for (std::size_t t = 4; t < 7; ++t)
    for (double v : enc.rows[t]->data) EXPECT_EQ(v, 0.0);
}

TEST(Bilstm, BatchRowsIndependent) {
  // Encoding two sequences together equals encoding them one at a time.
  Rng rng(7);
  auto f = LSTMParams::init(3, 3, rng), b = LSTMParams::init(3, 3, rng);
  const auto s1 = random_seq(rng, 4, 2, 1), s2 = random_seq(rng, 4, 2, 1);
  std::vector<Var> x, l;
  std::vector<Mask> mask;
  for (std::size_t t = 0; t < 4; ++t) {
    x.push_back(make_tensor({2, 2}, {s1.x[t]->data[0], s1.x[t]->data[1], s2.x[t]->data[0], s2.x[t]->data[1]}));
    l.push_back(make_tensor({2, 1}, {s1.l[t]->data[0], s2.l[t]->data[0]}));
    mask.push_back({true, t < 2});
  }
  Tape tape(false);
  const auto both = bilstm_encode(tape, x, l, mask, f, b);
  auto short2 = s2;
  short2.x.resize(2), short2.l.resize(2), short2.mask.resize(2);
  const auto one = bilstm_encode(tape, s1.x, s1.l, s1.mask, f, b);
  const auto two = bilstm_encode(tape, short2.x, short2.l, short2.mask, f, b);
  const std::size_t w = both.width;
  for (std::size_t t = 0; t < 4; ++t)
    for (std::size_t j = 0; j < w; ++j) {
      EXPECT_NEAR(both.rows[t]->data[j], one.rows[t]->data[j], 1e-14);
      if (t < 2) EXPECT_NEAR(both.rows[t]->data[w + j], two.rows[t]->data[j], 1e-14);
    }
}

TEST(Bilstm, PalindromeWithSharedWeightsIsMirrorSymmetric) {
  Rng rng(8);
  auto f = LSTMParams::init(4, 3, rng);
  randomize(f, rng);
  auto half = random_seq(rng, 3, 2, 1);
  SeqInput pal = half;
  for (int t = 1; t >= 0; --t) {
    pal.x.push_back(half.x[t]);
    pal.l.push_back(half.l[t]);
    pal.mask.push_back({true});
  }
  Tape tape(false);
  const auto enc = bilstm_encode(tape, pal.x, pal.l, pal.mask, f, f);
  const std::size_t n = pal.x.size();
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(enc.rows[t]->data[j], enc.rows[n - 1 - t]->data[4 + j], 1e-14);
}

TEST(Bilstm, HiddenBoundedByOne) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    auto f = LSTMParams::init(4, 3, rng), b = LSTMParams::init(4, 3, rng);
    randomize(f, rng, 5.0);
    randomize(b, rng, 5.0);
    auto seq = random_seq(rng, 8, 2, 1);
    for (auto& v : seq.x) for (auto& e : v->data) e *= 10.0;
    Tape tape(false);
    const auto enc = bilstm_encode(tape, seq.x, seq.l, seq.mask, f, b);
    for (const auto& r : enc.rows)
      for (std::size_t j = 0; j < 8; ++j) EXPECT_LE(std::abs(r->data[j]), 1.0);
  }
}

TEST(Bilstm, FullyMaskedSequenceRejected) {
  Rng rng(10);
  const auto f = LSTMParams::init(2, 2, rng);
  Tape tape;
  EXPECT_THROW(lstm_encode(tape, {zeros({1, 2})}, {zeros({1, 0})}, {{false}}, f), EmptySupportError);
  EXPECT_THROW(lstm_encode(tape, {}, {}, {}, f), EmptySupportError);
  EXPECT_THROW(lstm_encode(tape, {zeros({1, 2})}, {}, {{true}}, f), DimensionError);
}

TEST(Bilstm, GradientCheck) {
  Rng rng(11);
  auto f = LSTMParams::init(3, 4, rng), b = LSTMParams::init(3, 4, rng);
  randomize(f, rng, 0.5);
  randomize(b, rng, 0.5);
  Var x0 = make_tensor({2, 3}, oracle::random_vector(rng, 6), true);
  Var x1 = make_tensor({2, 3}, oracle::random_vector(rng, 6), true);
  Var x2 = make_tensor({2, 3}, oracle::random_vector(rng, 6), true);
  const std::vector<Var> l = {make_tensor({2, 1}, {0.5, 0}), make_tensor({2, 1}, {0, 1}), make_tensor({2, 1}, {1, 1})};
  const std::vector<Mask> mask = {{true, true}, {true, true}, {true, false}};
  const Var probe = make_tensor({2, 7}, oracle::random_vector(rng, 14));
  auto params = f.named("f");
  for (auto& np : b.named("b")) params.push_back(np);
  params.push_back({"x0", x0});
  params.push_back({"x1", x1});
  params.push_back({"x2", x2});
  const auto report = grad_check(
      [&](Tape& tape) {
        const auto enc = bilstm_encode(tape, {x0, x1, x2}, l, mask, f, b);
        Var total;
        for (const auto& r : enc.rows) {
          const Var term = sum(tape, mul(tape, r, probe));
          total = total ? add(tape, total, term) : term;
        }
        return total;
      },
      params);
  for (const auto& e : report.entries) EXPECT_TRUE(e.passed) << e.name << " " << e.max_rel_error;
  EXPECT_TRUE(report.passed);
}
