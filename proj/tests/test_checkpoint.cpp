#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rqa/checkpoint.hpp"
#include "rqa/errors.hpp"
#include "rqa/train.hpp"

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

std::vector<Instance> data() {
  return {tf("are you ok", "yes", Label::True), tf("are you ok", "no", Label::False),
          tf("do you like tea", "maybe", Label::Uncertain), tf("do you like tea", "of course", Label::True),
          tf("are you ok", "not at all", Label::False), tf("do you like tea", "i guess", Label::Uncertain)};
}

std::string path_for(const std::string& name) {
  std::filesystem::create_directories(RQA_TEST_TMP);
  return std::string(RQA_TEST_TMP) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Checkpoint trained(Variant v) {
  ModelConfig m;
  m.variant = v;
  m.hidden = 4;
  m.word_dim = 5;
  m.lexical = {2, 0.6};
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 2;
  cfg.lr = 0.01;
  cfg.min_count = 0;
  cfg.holdout = 0.0;
  return train(m, data(), cfg, Lexicon::starter());
}

}  // namespace

TEST(Checkpoint, RoundTripReproducesMetricsAndBytes) {
  for (auto v : {Variant::SemiIan, Variant::IanPlus, Variant::LstmAQ, Variant::BowLr, Variant::Rule}) {
    const auto ckpt = trained(v);
    const auto path = path_for(std::string("rt_") + std::string(variant_name(v)) + ".json");
    save_checkpoint(ckpt, path);
    const auto back = load_checkpoint(path);
    EXPECT_EQ(evaluate(back, data()), evaluate(ckpt, data())) << variant_name(v);
    const auto pa = ckpt.predict_probs(data()), pb = back.predict_probs(data());
    for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(pa[i], pb[i]);
    const auto again = path_for(std::string("rt2_") + std::string(variant_name(v)) + ".json");
    save_checkpoint(back, again);
    EXPECT_EQ(slurp(path), slurp(again));
  }
}

TEST(Checkpoint, HeaderFields) {
  const auto j = checkpoint_to_json(trained(Variant::SemiIan));
  EXPECT_EQ(j.at("format_version"), kCheckpointFormatVersion);
  for (const char* key : {"config", "vocab", "lexicon", "params", "meta"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j.at("meta").at("epochs_run"), 3);
}

TEST(Checkpoint, ForeignVersionRejected) {
  auto j = nlohmann::json::parse(checkpoint_to_json(trained(Variant::Rule)).dump());
  j["format_version"] = 999;
  EXPECT_THROW(checkpoint_from_json(j), UnsupportedVersionError);
  const auto path = path_for("v999.json");
  std::ofstream(path) << j.dump();
  EXPECT_THROW(load_checkpoint(path), UnsupportedVersionError);
}

TEST(Checkpoint, TruncatedFileIsParseError) {
  const auto path = path_for("truncated.json");
  save_checkpoint(trained(Variant::SemiIan), path);
  const auto text = slurp(path);
  std::ofstream(path, std::ios::binary) << text.substr(0, text.size() / 2);
  EXPECT_THROW(load_checkpoint(path), ParseError);
  EXPECT_THROW(load_checkpoint(path_for("does_not_exist.json")), IoError);
}

TEST(Checkpoint, StructuralDamageIsFormatError) {
  auto j = nlohmann::json::parse(checkpoint_to_json(trained(Variant::SemiIan)).dump());
  j.erase("vocab");
  EXPECT_THROW(checkpoint_from_json(j), FormatError);
  EXPECT_THROW(checkpoint_from_json(nlohmann::json::array()), FormatError);
  auto k = nlohmann::json::parse(checkpoint_to_json(trained(Variant::SemiIan)).dump());
  k["params"]["head.W"]["data"].erase(0);
  EXPECT_THROW(checkpoint_from_json(k), Error);
}

TEST(Checkpoint, VocabMismatchOnEvaluate) {
  auto ckpt = trained(Variant::BowLr);
  ckpt.vocab = Vocabulary::build({tokenize("a a a b b b c c c")}, 0);
  EXPECT_THROW(evaluate(ckpt, data()), CompatibilityError);
}

TEST(Checkpoint, ArgmaxTiesGoLow) {
  EXPECT_EQ(argmax_label({1.0 / 3, 1.0 / 3, 1.0 / 3}), Label::False);
  EXPECT_EQ(argmax_label({0.2, 0.4, 0.4}), Label::True);
  EXPECT_EQ(argmax_label({0.1, 0.2, 0.7}), Label::Uncertain);
}
