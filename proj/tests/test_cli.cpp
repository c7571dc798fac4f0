#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "rqa/cli.hpp"

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result cli(std::vector<std::string> args, const std::string& stdin_text = "") {
  args.insert(args.begin(), "rqa");
  std::istringstream in(stdin_text);
  std::ostringstream out, err;
  Result r;
  r.code = rqa::cli::run(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string dir(const std::string& name) {
  const auto d = std::string(RQA_TEST_TMP) + "/cli_" + name;
  std::filesystem::create_directories(d);
  return d;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const std::vector<std::string> kModelFlags = {"--task", "--model", "--k", "--rho-lex", "--rho-opt", "--hidden",
                                              "--word-dim", "--no-extra-embedding", "--lexicon"};
const std::vector<std::string> kTrainFlags = {"--epochs", "--lr", "--batch", "--seed", "--embeddings"};

// Small TF corpus shared by the tests below (generated once).
const std::pair<std::string, std::string>& tf_corpus() {
  static const auto paths = [] {
    const auto d = dir("corpus");
    const auto r = cli({"gensynth", "--task", "tf", "--train", "60", "--test", "20", "--seed", "3", "--out", d});
    EXPECT_EQ(r.code, 0) << r.err;
    return std::pair{d + "/tf_train.jsonl", d + "/tf_test.jsonl"};
  }();
  return paths;
}

std::vector<std::string> small_train_flags() {
  return {"--hidden", "4", "--word-dim", "4", "--epochs", "2", "--batch", "16", "--min-count", "0", "--quiet"};
}

}  // namespace

TEST(CliHelp, EverySubcommandListsItsFlags) {
  const std::map<std::string, std::vector<std::string>> expected = {
      {"train", {"--data", "--test", "--checkpoint", "--out", "--patience", "--optimizer", "--bow-input", "--rules"}},
      {"eval", {"--checkpoint", "--data", "--setting", "--task", "--out"}},
      {"predict", {"--checkpoint", "--data", "--task", "--out"}},
      {"gridsearch", {"--data", "--test", "--jobs", "--subsample", "--grid-k", "--grid-rho-lex", "--grid-rho-opt"}},
      {"ablation", {"--data", "--test", "--models", "--out"}},
      {"gradcheck", {"--model", "--task", "--seed", "--step", "--tol", "--out"}},
      {"gensynth", {"--task", "--train", "--test", "--seed", "--out"}},
      {"demo", {"--checkpoint", "--question", "--option"}},
  };
  for (const auto& [sub, flags] : expected) {
    const auto r = cli({sub, "--help"});
    EXPECT_EQ(r.code, 0) << sub;
    auto all = flags;
    if (sub == "train" || sub == "gridsearch" || sub == "ablation") {
      all.insert(all.end(), kModelFlags.begin(), kModelFlags.end());
      all.insert(all.end(), kTrainFlags.begin(), kTrainFlags.end());
    }
    for (const auto& f : all) EXPECT_NE(r.out.find(f), std::string::npos) << sub << " --help lacks " << f;
  }
}

TEST(CliErrors, ExitCodesAndMessages) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"train", "--bogus"}).code, 2);
  EXPECT_EQ(cli({"fly"}).code, 2);
  const auto missing = cli({"eval", "--checkpoint", "/nonexistent/ckpt.json", "--data", "/nonexistent/x.jsonl"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_EQ(missing.err.rfind("error: ", 0), 0u) << missing.err;
  EXPECT_NE(missing.err.find("/nonexistent/ckpt.json"), std::string::npos);
  EXPECT_EQ(count_lines(missing.err), 1u);
  // A T/F file passed as MC is a usage error.
  const auto& [train, _] = tf_corpus();
  auto args = std::vector<std::string>{"train", "--task", "mc", "--data", train, "--checkpoint", dir("err") + "/c.json"};
  const auto bad = cli(args);
  EXPECT_EQ(bad.code, 2) << bad.err;
  EXPECT_EQ(bad.err.rfind("error: ", 0), 0u);
}

TEST(CliGensynth, ByteIdenticalAcrossRuns) {
  const auto a = dir("gen_a"), b = dir("gen_b");
  for (const auto& d : {a, b}) {
    const auto r = cli({"gensynth", "--task", "mc", "--train", "50", "--test", "10", "--seed", "7", "--out", d});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, d + "/mc_train.jsonl\n" + d + "/mc_test.jsonl\n");
  }
  EXPECT_EQ(slurp(a + "/mc_train.jsonl"), slurp(b + "/mc_train.jsonl"));
  EXPECT_EQ(count_lines(slurp(a + "/mc_test.jsonl")), 10u);
}

TEST(CliTrain, DeterministicCheckpointsAndReports) {
  const auto& [train, test] = tf_corpus();
  const auto d = dir("train");
  std::vector<std::string> outs;
  for (const auto* name : {"a", "b"}) {
    auto args = std::vector<std::string>{"train", "--model", "semi-ian", "--data", train, "--test", test,
                                         "--checkpoint", d + "/" + name + ".json", "--out", d + "/" + name + ".tsv"};
    for (const auto& f : small_train_flags()) args.push_back(f);
    const auto r = cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    outs.push_back(slurp(d + "/" + name + ".tsv"));
  }
  EXPECT_EQ(slurp(d + "/a.json"), slurp(d + "/b.json"));
  EXPECT_EQ(outs[0], outs[1]);
  EXPECT_EQ(outs[0].rfind("model\tsetting\taccuracy\n", 0), 0u) << outs[0];
  EXPECT_NE(outs[0].find("semi-ian\ttest\t"), std::string::npos);
}

TEST(CliPredictEval, LineCountsAndRoundTrip) {
  const auto& [train, test] = tf_corpus();
  const auto d = dir("predict");
  auto args = std::vector<std::string>{"train", "--model", "bow-lr", "--data", train, "--checkpoint", d + "/bow.json"};
  for (const auto& f : small_train_flags()) args.push_back(f);
  ASSERT_EQ(cli(args).code, 0);
  const auto p = cli({"predict", "--checkpoint", d + "/bow.json", "--data", test});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(count_lines(p.out), count_lines(slurp(test)));
  const auto first = nlohmann::json::parse(p.out.substr(0, p.out.find('\n')));
  EXPECT_TRUE(first.contains("label"));
  EXPECT_TRUE(first.contains("probs"));
  // Labels are optional for prediction.
  const auto unlabeled = d + "/unlabeled.jsonl";
  std::ofstream(unlabeled) << R"({"id":"u1","question":"are you ok","answer":"yes"})" << '\n';
  const auto u = cli({"predict", "--checkpoint", d + "/bow.json", "--data", unlabeled});
  EXPECT_EQ(u.code, 0) << u.err;
  EXPECT_EQ(count_lines(u.out), 1u);
  const auto e1 = cli({"eval", "--checkpoint", d + "/bow.json", "--data", test});
  const auto e2 = cli({"eval", "--checkpoint", d + "/bow.json", "--data", test});
  ASSERT_EQ(e1.code, 0) << e1.err;
  EXPECT_EQ(e1.out, e2.out);
  EXPECT_EQ(e1.out.rfind("model\tsetting\taccuracy\n", 0), 0u) << e1.out;
  EXPECT_EQ(cli({"eval", "--checkpoint", d + "/bow.json", "--data", test, "--task", "mc"}).code, 2);
}

TEST(CliPredict, McLinesHavePerOptionAndFinal) {
  const auto d = dir("mc");
  ASSERT_EQ(cli({"gensynth", "--task", "mc", "--train", "40", "--test", "8", "--seed", "2", "--out", d}).code, 0);
  auto args = std::vector<std::string>{"train", "--task", "mc", "--model", "ian-plus", "--data", d + "/mc_train.jsonl",
                                       "--checkpoint", d + "/c.json"};
  for (const auto& f : small_train_flags()) args.push_back(f);
  ASSERT_EQ(cli(args).code, 0);
  const auto p = cli({"predict", "--checkpoint", d + "/c.json", "--data", d + "/mc_test.jsonl"});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(count_lines(p.out), 8u);
  const auto first = nlohmann::json::parse(p.out.substr(0, p.out.find('\n')));
  EXPECT_TRUE(first.contains("per_option"));
  EXPECT_TRUE(first.contains("final"));
}

TEST(CliGradcheck, SemiIanAndIanPlusPass) {
  for (const auto* model : {"semi-ian", "ian-plus"}) {
    for (const auto* task : {"tf", "mc"}) {
      const auto r = cli({"gradcheck", "--model", model, "--task", task});
      EXPECT_EQ(r.code, 0) << model << " " << task << "\n" << r.out << r.err;
      EXPECT_NE(r.out.find("overall\t-\t-\tPASS"), std::string::npos);
      EXPECT_NE(r.out.find("head.W"), std::string::npos);
    }
  }
  EXPECT_EQ(cli({"gradcheck", "--model", "rule"}).code, 2);
}

TEST(CliDemo, ReplClassifiesEachAnswer) {
  const auto& [train, _] = tf_corpus();
  const auto d = dir("demo");
  auto args = std::vector<std::string>{"train", "--model", "rule", "--data", train, "--checkpoint", d + "/rule.json"};
  for (const auto& f : small_train_flags()) args.push_back(f);
  ASSERT_EQ(cli(args).code, 0);
  const auto r = cli({"demo", "--checkpoint", d + "/rule.json"}, "are you ok\nyes of course\nno\n:quit\nmaybe\n");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("question> "), std::string::npos);
  EXPECT_NE(r.out.find("label: true"), std::string::npos);
  EXPECT_NE(r.out.find("label: false"), std::string::npos);
  EXPECT_EQ(r.out.find("label: uncertain"), std::string::npos);  // input after :quit is ignored
}
