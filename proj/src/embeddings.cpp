#include "rqa/embeddings.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rqa/errors.hpp"

namespace rqa {

EmbeddingTable random_embeddings(const Vocabulary& vocab, std::size_t dim, Rng& rng) {
  EmbeddingTable table;
  table.dim = dim;
  table.data.assign(vocab.size() * dim, 0.0);
  Rng unk_rng(kUnkVectorSeed);
  for (std::size_t j = 0; j < dim; ++j) {
    table.data[Vocabulary::kUnk * dim + j] = unk_rng.uniform(-kEmbeddingInitRange, kEmbeddingInitRange);
  }
  for (std::size_t i = 2; i < vocab.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j)
      table.data[i * dim + j] = rng.uniform(-kEmbeddingInitRange, kEmbeddingInitRange);
  return table;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

EmbeddingTable load_embeddings(const std::string& path, const Vocabulary& vocab, Rng& rng,
                               std::optional<std::size_t> dim) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embeddings file: " + path);

  std::string line;
  std::size_t line_no = 0;
  std::optional<EmbeddingTable> table;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_ws(line);
    if (fields.empty()) continue;
    const std::size_t count = fields.size() - 1;
    if (!table) {
      if (dim && count != *dim) {
        throw ParseError(path + ": line " + std::to_string(line_no) + ": expected " + std::to_string(*dim) +
                         " values, found " + std::to_string(count));
      }
      if (count == 0) throw ParseError(path + ": line " + std::to_string(line_no) + ": no vector values");
      table = random_embeddings(vocab, count, rng);
    } else if (count != table->dim) {
      const std::string msg = path + ": line " + std::to_string(line_no) + ": expected " +
                              std::to_string(table->dim) + " values, found " + std::to_string(count);
      if (dim) throw ParseError(msg);
      throw FormatError("inconsistent embedding dimensions: " + msg);
    }
    values.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
      const auto f = fields[j + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[j]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(path + ": line " + std::to_string(line_no) + ": bad number '" + std::string(f) + "'");
      }
    }
    const std::string token(fields[0]);
    if (token == Vocabulary::kPadToken || !vocab.contains(token)) continue;
    const std::size_t idx = vocab.index(token);
    std::copy(values.begin(), values.end(), table->data.begin() + static_cast<std::ptrdiff_t>(idx * table->dim));
  }
  if (!table) throw FormatError("embeddings file " + path + " contains no vectors");
  return *table;
}

}  // namespace rqa
