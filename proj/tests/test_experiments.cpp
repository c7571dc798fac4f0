#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "rqa/errors.hpp"
#include "rqa/experiments.hpp"

using namespace rqa;

namespace {

Instance tf(const std::string& q, const std::string& a, Label label) {
  Instance inst;
  inst.group = q + "|" + a;
  inst.question = tokenize(q);
  inst.answer = tokenize(a);
  inst.label = label;
  return inst;
}

std::vector<Instance> data(int copies) {
  std::vector<Instance> out;
  for (int i = 0; i < copies; ++i) {
    const auto s = std::to_string(i);
    out.push_back(tf("are you ok " + s, "yes", Label::True));
    out.push_back(tf("do you like tea " + s, "not really", Label::False));
    out.push_back(tf("are you a teacher " + s, "maybe", Label::Uncertain));
  }
  return out;
}

ModelConfig tiny(Variant v) {
  ModelConfig m;
  m.variant = v;
  m.hidden = 3;
  m.word_dim = 4;
  m.dropout = 0.0;
  return m;
}

TrainConfig quick() {
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 8;
  cfg.lr = 0.01;
  cfg.min_count = 0;
  cfg.holdout = 0.2;
  return cfg;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Grid, CardinalityAndOrder) {
  TrainConfig cfg;
  const auto tfg = enumerate_grid(Task::TF, cfg);
  ASSERT_EQ(tfg.size(), 50u);
  EXPECT_EQ(tfg[0].k, 1u);
  EXPECT_DOUBLE_EQ(tfg[0].rho_lex, 0.1);
  EXPECT_EQ(tfg[10].k, 2u);
  EXPECT_EQ(tfg[49].k, 16u);
  EXPECT_DOUBLE_EQ(tfg[49].rho_lex, 1.0);
  for (const auto& p : tfg) EXPECT_FALSE(p.rho_opt.has_value());
  const auto mcg = enumerate_grid(Task::MC, cfg);
  ASSERT_EQ(mcg.size(), 500u);
  for (const auto& p : mcg) EXPECT_TRUE(p.rho_opt.has_value());
  std::set<std::tuple<std::size_t, double, double>> distinct;
  for (const auto& p : mcg) distinct.insert({p.k, p.rho_lex, *p.rho_opt});
  EXPECT_EQ(distinct.size(), 500u);
}

TEST(Grid, SubsampleSeededAndInGridOrder) {
  TrainConfig cfg;
  cfg.grid_subsample = 7;
  const auto a = enumerate_grid(Task::MC, cfg), b = enumerate_grid(Task::MC, cfg);
  ASSERT_EQ(a.size(), 7u);
  const auto full = enumerate_grid(Task::MC, TrainConfig{});
  std::size_t last = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].k, b[i].k);
    EXPECT_EQ(a[i].rho_lex, b[i].rho_lex);
    std::size_t pos = 0;
    while (!(full[pos].k == a[i].k && full[pos].rho_lex == a[i].rho_lex && full[pos].rho_opt == a[i].rho_opt)) ++pos;
    if (i) EXPECT_GT(pos, last);
    last = pos;
  }
}

TEST(Grid, RejectsOutOfRangeValues) {
  TrainConfig cfg;
  cfg.grid_k = {3};
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = TrainConfig{};
  cfg.grid_rho_lex = {0.15};
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Grid, BestIsMaxAndParallelEqualsSerial) {
  auto cfg = quick();
  cfg.grid_k = {1, 2};
  cfg.grid_rho_lex = {0.5, 1.0};
  const auto train = data(6), test = data(2);
  const auto serial = grid_search(tiny(Variant::SemiIan), train, &test, cfg, Lexicon::starter());
  ASSERT_EQ(serial.results.size(), 4u);
  ASSERT_TRUE(serial.best.has_value());
  for (const auto& r : serial.results) {
    EXPECT_TRUE(r.ok) << r.error;
    EXPECT_LE(r.heldout_accuracy, serial.results[*serial.best].heldout_accuracy);
    EXPECT_TRUE(r.test_accuracy.has_value());
  }
  for (std::size_t i = 0; i < *serial.best; ++i)
    EXPECT_LT(serial.results[i].heldout_accuracy, serial.results[*serial.best].heldout_accuracy);
  cfg.jobs = 3;
  const auto parallel = grid_search(tiny(Variant::SemiIan), train, &test, cfg, Lexicon::starter());
  EXPECT_EQ(parallel.to_tsv(), serial.to_tsv());
  const auto rows = lines(serial.to_tsv());
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "model\tk\trho_lex\trho_opt\theldout_accuracy\ttest_accuracy\tstatus\tselected");
}

TEST(Grid, FailingPointsAreRecordedNotFatal) {
  auto cfg = quick();
  cfg.grid_k = {1};
  cfg.grid_rho_lex = {1.0};
  // An MC model on T/F data fails at every point.
  auto m = tiny(Variant::SemiIan);
  m.task = Task::MC;
  const auto report = grid_search(m, data(3), nullptr, cfg, Lexicon::starter());
  ASSERT_EQ(report.results.size(), 10u);
  for (const auto& r : report.results) {
    EXPECT_FALSE(r.ok);
    EXPECT_FALSE(r.error.empty());
  }
  EXPECT_FALSE(report.best.has_value());
}

TEST(Ablation, TwoRowsPerModelOnIdenticalSplit) {
  const auto train = data(5), test = data(2);
  const auto report = ablation({tiny(Variant::BilstmAQ), tiny(Variant::IanPlus), tiny(Variant::SemiIan)}, train, test,
                               quick(), Lexicon::starter());
  ASSERT_EQ(report.rows.size(), 6u);
  const auto fp = split_fingerprint(test);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(report.rows[i].setting, i % 2 ? 'O' : 'W');
    EXPECT_EQ(report.rows[i].test_split, fp);
    EXPECT_EQ(report.rows[i].test_size, test.size());
  }
  EXPECT_EQ(report.rows[0].model, "bilstm-aq");
  EXPECT_EQ(report.rows[1].model, "bilstm-aq");
  const auto rows = lines(report.to_tsv());
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0], "model\tsetting\taccuracy\ttest_size\ttest_split");
  EXPECT_THROW(ablation({ModelConfig{Variant::Rule}}, train, test, quick(), Lexicon::starter()), UsageError);
}

TEST(Ablation, FingerprintTracksLabelsAndOrder) {
  auto a = data(2);
  const auto fa = split_fingerprint(a);
  EXPECT_EQ(fa, split_fingerprint(data(2)));
  a[0].label = Label::False;
  EXPECT_NE(split_fingerprint(a), fa);
}

TEST(Format, FixedPrecision) {
  EXPECT_EQ(format_accuracy(0.5), "0.500000");
  EXPECT_EQ(format_accuracy(1.0 / 3.0), "0.333333");
}
