#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rqa/dataset.hpp"
#include "rqa/random.hpp"

namespace rqa {

struct SyntheticPaths {
  std::string train;
  std::string test;
};

/// Template-driven English corpora for reverse-QA experiments. T/F answers
/// come in affirmative, negative and uncertain/off-topic styles with filler
/// noise; MC questions embed their options and answers pick one option,
/// several, all, none, everything except one, or dodge the question.
///
/// Returns JSONL lines (no trailing newline). Output depends only on the
/// generator state, so a fixed seed yields byte-identical corpora.
std::vector<std::string> synthetic_tf_lines(std::size_t n, Rng& rng, const std::string& id_prefix);
std::vector<std::string> synthetic_mc_lines(std::size_t n, Rng& rng, const std::string& id_prefix);

/// Writes `<out_dir>/<task>_train.jsonl` and `<out_dir>/<task>_test.jsonl`.
SyntheticPaths generate_synthetic(Task task, std::size_t n_train, std::size_t n_test, std::uint64_t seed,
                                  const std::string& out_dir);

}  // namespace rqa
