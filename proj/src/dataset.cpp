#include "rqa/dataset.hpp"

#include <fstream>

#include "rqa/errors.hpp"

namespace rqa {

std::string_view label_name(Label label) {
  switch (label) {
    case Label::False:
      return "false";
    case Label::True:
      return "true";
    case Label::Uncertain:
      return "uncertain";
  }
  return "?";
}

Label label_from_int(long long value) {
  if (value < 0 || value > 2) {
    throw ValidationError("label " + std::to_string(value) + " outside {0,1,2}");
  }
  return static_cast<Label>(value);
}

std::string_view task_name(Task task) { return task == Task::TF ? "tf" : "mc"; }

Task parse_task(std::string_view name) {
  if (name == "tf") return Task::TF;
  if (name == "mc") return Task::MC;
  throw UsageError("unknown task '" + std::string(name) + "' (expected tf or mc)");
}

void MCExample::validate() const {
  if (question.empty()) throw ValidationError("MC example " + id + ": empty question");
  if (answer.empty()) throw ValidationError("MC example " + id + ": empty answer");
  if (options.empty()) throw ValidationError("MC example " + id + ": no options");
  if (labels.size() != options.size()) {
    throw ValidationError("MC example " + id + ": " + std::to_string(options.size()) + " options but " +
                          std::to_string(labels.size()) + " labels");
  }
  for (const auto& s : options) {
    if (s.begin >= s.end || s.end > question.size()) {
      throw ValidationError("MC example " + id + ": option span outside question bounds");
    }
  }
}

Span resolve_span(const Tokens& question, const Tokens& option, const std::vector<Span>& taken) {
  if (option.empty()) throw SpanResolutionError("empty option text");
  std::optional<Span> first;
  if (option.size() <= question.size()) {
    for (std::size_t start = 0; start + option.size() <= question.size(); ++start) {
      if (!std::equal(option.begin(), option.end(), question.begin() + static_cast<std::ptrdiff_t>(start)))
        continue;
      Span s{start, start + option.size()};
      if (!first) first = s;
      bool clash = false;
      for (const auto& t : taken) clash = clash || s.overlaps(t);
      if (!clash) return s;
    }
  }
  if (first) return *first;
  throw SpanResolutionError("option '" + join_tokens(option) + "' not found in question '" +
                            join_tokens(question) + "'");
}

namespace {

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

Tokens text_field(const nlohmann::json& row, const char* key, std::size_t line_no) {
  if (!row.contains(key)) throw ValidationError(where(line_no) + "missing field '" + key + "'");
  const auto& v = row.at(key);
  if (v.is_string()) return tokenize(v.get<std::string>());
  if (v.is_array()) {
    Tokens out;
    for (const auto& t : v) {
      if (!t.is_string()) throw ValidationError(where(line_no) + "'" + key + "' array holds a non-string");
      out.push_back(t.get<std::string>());
    }
    return out;
  }
  throw ValidationError(where(line_no) + "'" + key + "' must be a string or token array");
}

Label label_field(const nlohmann::json& v, std::size_t line_no) {
  if (!v.is_number_integer()) throw ValidationError(where(line_no) + "label must be an integer");
  try {
    return label_from_int(v.get<long long>());
  } catch (const ValidationError& e) {
    throw ValidationError(where(line_no) + e.what());
  }
}

std::string id_field(const nlohmann::json& row, std::size_t line_no) {
  if (!row.contains("id")) return std::to_string(line_no);
  const auto& v = row.at("id");
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ValidationError(where(line_no) + "id must be a string");
}

template <typename Parse>
auto read_jsonl(const std::string& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);
  std::vector<decltype(parse(nlohmann::json{}, std::size_t{}))> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ": " + where(line_no) + e.what());
    }
    if (!row.is_object()) throw ParseError(path + ": " + where(line_no) + "expected a JSON object");
    out.push_back(parse(row, line_no));
  }
  return out;
}

}  // namespace

TFExample parse_tf_row(const nlohmann::json& row, std::size_t line_no, Labels labels) {
  if (row.contains("options") || row.contains("labels")) {
    throw UsageError(where(line_no) + "multiple-choice record found in a T/F dataset (use --task mc)");
  }
  TFExample ex;
  ex.id = id_field(row, line_no);
  ex.question = text_field(row, "question", line_no);
  ex.answer = text_field(row, "answer", line_no);
  if (row.contains("label")) {
    ex.label = label_field(row.at("label"), line_no);
  } else if (labels == Labels::Required) {
    throw ValidationError(where(line_no) + "missing field 'label'");
  }
  if (ex.question.empty()) throw ValidationError(where(line_no) + "question is empty after tokenization");
  if (ex.answer.empty()) throw ValidationError(where(line_no) + "answer is empty after tokenization");
  return ex;
}

MCExample parse_mc_row(const nlohmann::json& row, std::size_t line_no, Labels labels) {
  if (!row.contains("options") && row.contains("label")) {
    throw UsageError(where(line_no) + "T/F record found in a multiple-choice dataset (use --task tf)");
  }
  MCExample ex;
  ex.id = id_field(row, line_no);
  ex.question = text_field(row, "question", line_no);
  ex.answer = text_field(row, "answer", line_no);
  if (!row.contains("options") || !row.at("options").is_array()) {
    throw ValidationError(where(line_no) + "'options' must be an array");
  }
  const bool has_labels = row.contains("labels");
  if ((has_labels || labels == Labels::Required) && (!has_labels || !row.at("labels").is_array())) {
    throw ValidationError(where(line_no) + "'labels' must be an array");
  }
  const auto& opts = row.at("options");
  if (has_labels && opts.size() != row.at("labels").size()) {
    throw ValidationError(where(line_no) + std::to_string(opts.size()) + " options but " +
                          std::to_string(row.at("labels").size()) + " labels");
  }
  for (const auto& o : opts) {
    Tokens option_tokens;
    if (o.is_string()) {
      option_tokens = tokenize(o.get<std::string>());
    } else if (o.is_array()) {
      for (const auto& t : o) option_tokens.push_back(t.get<std::string>());
    } else {
      throw ValidationError(where(line_no) + "option must be a string or token array");
    }
    try {
      ex.options.push_back(resolve_span(ex.question, option_tokens, ex.options));
    } catch (const SpanResolutionError& e) {
      throw SpanResolutionError(where(line_no) + e.what());
    }
  }
  if (has_labels) {
    for (const auto& l : row.at("labels")) ex.labels.push_back(label_field(l, line_no));
  } else {
    ex.labels.assign(ex.options.size(), Label::Uncertain);
  }
  try {
    ex.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(where(line_no) + e.what());
  }
  return ex;
}

std::vector<TFExample> load_tf_dataset(const std::string& path, Labels labels) {
  return read_jsonl(path, [labels](const nlohmann::json& row, std::size_t n) { return parse_tf_row(row, n, labels); });
}

std::vector<MCExample> load_mc_dataset(const std::string& path, Labels labels) {
  return read_jsonl(path, [labels](const nlohmann::json& row, std::size_t n) { return parse_mc_row(row, n, labels); });
}

}  // namespace rqa
