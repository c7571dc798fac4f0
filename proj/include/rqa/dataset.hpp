#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rqa/text.hpp"

namespace rqa {

enum class Label : std::size_t { False = 0, True = 1, Uncertain = 2 };

inline constexpr std::size_t kNumClasses = 3;

std::string_view label_name(Label label);
Label label_from_int(long long value);  // ValidationError outside {0,1,2}

enum class Task { TF, MC };

std::string_view task_name(Task task);
Task parse_task(std::string_view name);

struct TFExample {
  std::string id;
  Tokens question;
  Tokens answer;
  Label label = Label::Uncertain;
};

/// Half-open token range [begin, end) inside the question.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool contains(std::size_t pos) const { return pos >= begin && pos < end; }
  bool overlaps(const Span& o) const { return begin < o.end && o.begin < end; }
  bool operator==(const Span&) const = default;
};

struct MCExample {
  std::string id;
  Tokens question;
  std::vector<Span> options;
  Tokens answer;
  std::vector<Label> labels;

  /// Throws ValidationError when the record breaks its invariants.
  void validate() const;
  bool operator==(const MCExample&) const = default;
};

/// First occurrence of `option` as a contiguous token run in `question`
/// that does not overlap an already-resolved span; falls back to the first
/// occurrence when every occurrence overlaps. SpanResolutionError if absent.
Span resolve_span(const Tokens& question, const Tokens& option, const std::vector<Span>& taken);

/// Unlabeled input (for prediction) gets Uncertain placeholders.
enum class Labels { Required, Optional };

TFExample parse_tf_row(const nlohmann::json& row, std::size_t line_no, Labels labels = Labels::Required);
MCExample parse_mc_row(const nlohmann::json& row, std::size_t line_no, Labels labels = Labels::Required);

/// JSONL readers. Text fields are either a string (tokenized here) or an
/// array of pre-segmented tokens used verbatim. Errors name the line.
std::vector<TFExample> load_tf_dataset(const std::string& path, Labels labels = Labels::Required);
std::vector<MCExample> load_mc_dataset(const std::string& path, Labels labels = Labels::Required);

}  // namespace rqa
