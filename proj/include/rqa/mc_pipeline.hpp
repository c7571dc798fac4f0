#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rqa/dataset.hpp"

namespace rqa {

/// Element of the MC answer-label set: a subset of option indices (empty =
/// Null) or the distinguished Uncertain element.
struct FinalMCLabel {
  bool uncertain = false;
  std::vector<std::size_t> options;  // ascending, 0-based

  static FinalMCLabel make_uncertain() { return {true, {}}; }
  static FinalMCLabel subset(std::vector<std::size_t> options) { return {false, std::move(options)}; }

  bool is_null() const { return !uncertain && options.empty(); }
  /// "uncertain", "null", or e.g. "{option1, option3}" (1-based names).
  std::string to_string() const;
  /// "uncertain" or an array of 1-based option numbers.
  nlohmann::json to_json() const;

  bool operator==(const FinalMCLabel&) const = default;
};

inline constexpr std::size_t kMaxOptions = 16;

/// All 2^n subsets in binary-counting order (bit i = option i; the first
/// element is Null) followed by Uncertain. SizeError for n > 16.
std::vector<FinalMCLabel> enumerate_label_set(std::size_t num_options);

/// One 3-class decision about a single option of an MC question.
struct OptionSubtask {
  std::string id;
  std::size_t option_index = 0;
  std::size_t num_options = 0;
  Tokens question;
  Span option;
  Tokens answer;
  Label label = Label::Uncertain;
};

std::vector<OptionSubtask> transform(const MCExample& example);

/// Inverse of transform for subtasks sharing an id (ordered by option index).
std::vector<MCExample> regroup(const std::vector<OptionSubtask>& subtasks);

/// Any Uncertain option makes the whole answer Uncertain; otherwise the
/// set of True options (possibly Null).
FinalMCLabel aggregate(const std::vector<Label>& per_option);

struct MCPrediction {
  std::vector<Label> per_option;
  FinalMCLabel final;
};

using OptionClassifier = std::function<Label(const OptionSubtask&)>;

/// Runs the classifier once per option and aggregates.
MCPrediction run_mc_inference(const OptionClassifier& classify, const MCExample& example);

}  // namespace rqa
