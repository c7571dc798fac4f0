#include "rqa/mc_pipeline.hpp"

#include <map>

#include "rqa/errors.hpp"

namespace rqa {

std::string FinalMCLabel::to_string() const {
  if (uncertain) return "uncertain";
  if (options.empty()) return "null";
  std::string out = "{";
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i) out += ", ";
    out += "option" + std::to_string(options[i] + 1);
  }
  return out + "}";
}

nlohmann::json FinalMCLabel::to_json() const {
  if (uncertain) return "uncertain";
  nlohmann::json arr = nlohmann::json::array();
  for (auto o : options) arr.push_back(o + 1);
  return arr;
}

std::vector<FinalMCLabel> enumerate_label_set(std::size_t num_options) {
  if (num_options > kMaxOptions) {
    throw SizeError("label set for " + std::to_string(num_options) + " options exceeds the " +
                    std::to_string(kMaxOptions) + "-option bound");
  }
  const std::size_t subsets = std::size_t{1} << num_options;
  std::vector<FinalMCLabel> out;
  out.reserve(subsets + 1);
  for (std::size_t bits = 0; bits < subsets; ++bits) {
    FinalMCLabel label;
    for (std::size_t i = 0; i < num_options; ++i) {
      if (bits & (std::size_t{1} << i)) label.options.push_back(i);
    }
    out.push_back(std::move(label));
  }
  out.push_back(FinalMCLabel::make_uncertain());
  return out;
}

std::vector<OptionSubtask> transform(const MCExample& example) {
  example.validate();
  std::vector<OptionSubtask> out;
  out.reserve(example.options.size());
  for (std::size_t i = 0; i < example.options.size(); ++i) {
    out.push_back(OptionSubtask{example.id, i, example.options.size(), example.question, example.options[i],
                                example.answer, example.labels[i]});
  }
  return out;
}

std::vector<MCExample> regroup(const std::vector<OptionSubtask>& subtasks) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const OptionSubtask*>> groups;
  for (const auto& s : subtasks) {
    auto& g = groups[s.id];
    if (g.empty()) order.push_back(s.id);
    g.push_back(&s);
  }
  std::vector<MCExample> out;
  for (const auto& id : order) {
    auto& g = groups[id];
    const std::size_t n = g.front()->num_options;
    if (g.size() != n) throw ValidationError("regroup: example " + id + " has an incomplete option set");
    MCExample ex;
    ex.id = id;
    ex.question = g.front()->question;
    ex.answer = g.front()->answer;
    ex.options.resize(n);
    ex.labels.resize(n);
    std::vector<bool> seen(n, false);
    for (const auto* s : g) {
      if (s->option_index >= n || seen[s->option_index]) {
        throw ValidationError("regroup: example " + id + " has a duplicate or out-of-range option");
      }
      seen[s->option_index] = true;
      ex.options[s->option_index] = s->option;
      ex.labels[s->option_index] = s->label;
    }
    out.push_back(std::move(ex));
  }
  return out;
}

FinalMCLabel aggregate(const std::vector<Label>& per_option) {
  if (per_option.empty()) throw ValidationError("aggregate: no per-option labels");
  FinalMCLabel out;
  for (std::size_t i = 0; i < per_option.size(); ++i) {
    if (per_option[i] == Label::Uncertain) return FinalMCLabel::make_uncertain();
    if (per_option[i] == Label::True) out.options.push_back(i);
  }
  return out;
}

MCPrediction run_mc_inference(const OptionClassifier& classify, const MCExample& example) {
  MCPrediction pred;
  for (const auto& subtask : transform(example)) pred.per_option.push_back(classify(subtask));
  pred.final = aggregate(pred.per_option);
  return pred;
}

}  // namespace rqa
