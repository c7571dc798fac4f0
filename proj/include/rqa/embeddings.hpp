#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rqa/random.hpp"
#include "rqa/text.hpp"

namespace rqa {

/// One row per vocabulary index, row-major |V| x dim.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<double> data;

  std::size_t rows() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const double> row(std::size_t index) const { return {data.data() + index * dim, dim}; }
  /// Unknown tokens resolve to the UNK row.
  std::span<const double> lookup(std::string_view token, const Vocabulary& vocab) const {
    return row(vocab.index(token));
  }
};

inline constexpr double kEmbeddingInitRange = 0.1;
inline constexpr std::uint64_t kUnkVectorSeed = 0x554e4bULL;

/// Uniform(-0.1, 0.1) rows from `rng`; PAD is zeros and UNK is drawn from a
/// fixed generator so it does not depend on the run seed.
EmbeddingTable random_embeddings(const Vocabulary& vocab, std::size_t dim, Rng& rng);

/// GloVe-style text: `token v1 ... vd` per line. When `dim` is unset the
/// first line fixes it and later disagreement is a FormatError; with an
/// explicit `dim`, a wrong value count is a ParseError naming the line.
/// Vocabulary tokens missing from the file keep their random row.
EmbeddingTable load_embeddings(const std::string& path, const Vocabulary& vocab, Rng& rng,
                               std::optional<std::size_t> dim = std::nullopt);

}  // namespace rqa
