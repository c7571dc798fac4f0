#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "rqa/embeddings.hpp"
#include "rqa/errors.hpp"

using namespace rqa;

namespace {

std::string tmp_file(const std::string& name, const std::string& content) {
  std::filesystem::create_directories(RQA_TEST_TMP);
  const auto path = std::string(RQA_TEST_TMP) + "/" + name;
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

Vocabulary small_vocab() { return Vocabulary::build({{"yes", "no", "tea"}}, 0); }

}  // namespace

TEST(LoadEmbeddings, ReadsVectorsVerbatim) {
  const auto vocab = small_vocab();
  Rng rng(1);
  const auto table = load_embeddings(tmp_file("e1.txt", "yes 0.1 0.2 0.3\nzebra 1 1 1\n"), vocab, rng);
  ASSERT_EQ(table.dim, 3u);
  ASSERT_EQ(table.rows(), vocab.size());
  const auto row = table.lookup("yes", vocab);
  EXPECT_EQ(std::vector<double>(row.begin(), row.end()), (std::vector<double>{0.1, 0.2, 0.3}));
  for (auto v : table.row(Vocabulary::kPad)) EXPECT_EQ(v, 0.0);
}

TEST(LoadEmbeddings, MissingTokensSeededAndInRange) {
  const auto vocab = small_vocab();
  const auto path = tmp_file("e2.txt", "yes 0.1 0.2 0.3\n");
  Rng r1(5), r2(5), r3(6);
  const auto a = load_embeddings(path, vocab, r1), b = load_embeddings(path, vocab, r2), c = load_embeddings(path, vocab, r3);
  EXPECT_EQ(a.data, b.data);
  EXPECT_NE(a.data, c.data);
  for (auto v : a.lookup("tea", vocab)) {
    EXPECT_GE(v, -0.1);
    EXPECT_LT(v, 0.1);
  }
  // UNK is fixed regardless of the run seed.
  const auto ua = a.row(Vocabulary::kUnk), uc = c.row(Vocabulary::kUnk);
  EXPECT_EQ(std::vector<double>(ua.begin(), ua.end()), std::vector<double>(uc.begin(), uc.end()));
  EXPECT_EQ(a.lookup("never-seen", vocab).data(), a.row(Vocabulary::kUnk).data());
}

TEST(LoadEmbeddings, WrongCountIsParseErrorWithLine) {
  const auto vocab = small_vocab();
  Rng rng(1);
  try {
    load_embeddings(tmp_file("e3.txt", "yes 0.1 0.2 0.3\nno 0.5 0.6\n"), vocab, rng, 3);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_embeddings(tmp_file("e4.txt", "yes 0.1 0.2 0.3\nno 0.5 0.6\n"), vocab, rng), FormatError);
  EXPECT_THROW(load_embeddings(tmp_file("e5.txt", "yes 0.1 abc 0.3\n"), vocab, rng), ParseError);
  EXPECT_THROW(load_embeddings(std::string(RQA_TEST_TMP) + "/absent.txt", vocab, rng), IoError);
}

TEST(RandomEmbeddings, ShapesAndDeterminism) {
  const auto vocab = small_vocab();
  Rng r1(3), r2(3);
  const auto a = random_embeddings(vocab, 4, r1), b = random_embeddings(vocab, 4, r2);
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(a.rows(), vocab.size());
  for (auto v : a.row(Vocabulary::kPad)) EXPECT_EQ(v, 0.0);
}
