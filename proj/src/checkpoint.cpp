#include "rqa/checkpoint.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "rqa/errors.hpp"
#include "rqa/random.hpp"

namespace rqa {

nlohmann::ordered_json TrainMeta::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["epochs_run"] = epochs_run;
  j["best_epoch"] = best_epoch;
  j["best_heldout_accuracy"] = best_heldout_accuracy;
  j["epoch_loss"] = epoch_loss;
  j["heldout_accuracy"] = heldout_accuracy;
  j["train_config"] = train_config;
  j["final_metrics"] = final_metrics;
  return j;
}

TrainMeta TrainMeta::from_json(const nlohmann::ordered_json& j) {
  TrainMeta m;
  m.seed = j.value("seed", std::uint64_t{0});
  m.epochs_run = j.value("epochs_run", std::size_t{0});
  m.best_epoch = j.value("best_epoch", std::size_t{0});
  m.best_heldout_accuracy = j.value("best_heldout_accuracy", 0.0);
  if (j.contains("epoch_loss")) m.epoch_loss = j.at("epoch_loss").get<std::vector<double>>();
  if (j.contains("heldout_accuracy")) m.heldout_accuracy = j.at("heldout_accuracy").get<std::vector<double>>();
  if (j.contains("train_config")) m.train_config = j.at("train_config");
  if (j.contains("final_metrics")) m.final_metrics = j.at("final_metrics");
  return m;
}

Label argmax_label(const ClassProbs& p) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < p.size(); ++c)
    if (p[c] > p[best]) best = c;
  return static_cast<Label>(best);
}

std::vector<ClassProbs> Checkpoint::predict_probs(const std::vector<Instance>& instances,
                                                  std::size_t batch_size) const {
  std::vector<ClassProbs> out;
  out.reserve(instances.size());
  switch (config.variant) {
    case Variant::Rule:
      for (const auto& inst : instances) {
        ClassProbs p{};
        p[static_cast<std::size_t>(rule_classify(inst.answer, rules))] = 1.0;
        out.push_back(p);
      }
      return out;
    case Variant::BowLr:
      for (const auto& inst : instances) out.push_back(bow.predict(inst, vocab));
      return out;
    default:
      break;
  }
  if (!model) throw CompatibilityError("checkpoint holds no neural model");
  for (const auto& idx : batch_indices(instances.size(), batch_size, nullptr)) {
    const auto probs = model->predict(make_batch(instances, idx, vocab));
    out.insert(out.end(), probs.begin(), probs.end());
  }
  return out;
}

std::vector<Label> Checkpoint::predict(const std::vector<Instance>& instances, std::size_t batch_size) const {
  std::vector<Label> labels;
  labels.reserve(instances.size());
  for (const auto& p : predict_probs(instances, batch_size)) labels.push_back(argmax_label(p));
  return labels;
}

std::vector<NamedParam> Checkpoint::parameters() const {
  if (config.variant == Variant::BowLr) {
    return {{"bow.W", make_tensor({bow.dim(), kNumClasses}, bow.weights())},
            {"bow.b", make_tensor({kNumClasses}, bow.bias())}};
  }
  if (config.variant == Variant::Rule || !model) return {};
  return model->parameters();
}

nlohmann::ordered_json checkpoint_to_json(const Checkpoint& ckpt) {
  nlohmann::ordered_json j;
  j["format_version"] = kCheckpointFormatVersion;
  auto config = ckpt.config.to_json();
  if (ckpt.config.variant == Variant::BowLr) config["bow_input"] = std::string(bow_input_name(ckpt.bow.mode()));
  if (ckpt.config.variant == Variant::Rule) config["rules"] = ckpt.rules.to_json();
  j["config"] = config;
  j["vocab"] = {{"min_count", ckpt.vocab.min_count()}, {"tokens", ckpt.vocab.tokens()}};
  j["lexicon"] = ckpt.lexicon.to_json();
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [name, p] : ckpt.parameters()) params[name] = {{"shape", p->shape}, {"data", p->data}};
  j["params"] = params;
  j["meta"] = ckpt.meta.to_json();
  return j;
}

namespace {

std::vector<double> param_data(const nlohmann::ordered_json& params, const std::string& name, const Shape& shape) {
  if (!params.contains(name)) throw FormatError("checkpoint is missing parameter '" + name + "'");
  const auto& p = params.at(name);
  const auto got = p.at("shape").get<Shape>();
  if (got != shape) {
    throw CompatibilityError("parameter '" + name + "' has shape " + shape_str(got) + ", expected " +
                             shape_str(shape));
  }
  auto data = p.at("data").get<std::vector<double>>();
  if (data.size() != num_elements(shape)) throw FormatError("parameter '" + name + "' has the wrong element count");
  return data;
}

}  // namespace

Checkpoint checkpoint_from_json(const nlohmann::ordered_json& j) {
  if (!j.is_object() || !j.contains("format_version")) throw FormatError("not a checkpoint: no format_version");
  const auto version = j.at("format_version");
  if (!version.is_number_integer() || version.get<long long>() != kCheckpointFormatVersion) {
    throw UnsupportedVersionError("unsupported checkpoint format_version " + version.dump() + " (this build reads " +
                                  std::to_string(kCheckpointFormatVersion) + ")");
  }
  Checkpoint c;
  try {
    // plain json (sorted keys) is fine everywhere except meta, whose order is echoed back on save
    const nlohmann::json cfg = j.at("config");
    c.config = ModelConfig::from_json(cfg);
    const auto& vj = j.at("vocab");
    c.vocab = Vocabulary::from_tokens(vj.at("tokens").get<std::vector<std::string>>(),
                                      vj.at("min_count").get<std::size_t>());
    c.lexicon = Lexicon::from_json(nlohmann::json(j.at("lexicon")));
    c.meta = TrainMeta::from_json(j.value("meta", nlohmann::ordered_json::object()));
    const auto& params = j.at("params");

    if (c.config.variant == Variant::Rule) {
      c.rules = RuleTable::from_json(cfg.at("rules"));
    } else if (c.config.variant == Variant::BowLr) {
      c.bow = SoftmaxRegression(c.vocab.size(), parse_bow_input(cfg.at("bow_input").get<std::string>()));
      c.bow.weights() = param_data(params, "bow.W", {c.vocab.size(), kNumClasses});
      c.bow.bias() = param_data(params, "bow.b", {kNumClasses});
    } else {
      Rng rng(0);
      c.model = std::make_shared<Model>(c.config, c.vocab.size(), c.lexicon, rng);
      for (const auto& [name, p] : c.model->parameters()) p->data = param_data(params, name, p->shape);
      if (params.size() != c.model->parameters().size()) throw FormatError("checkpoint has unexpected parameters");
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint: ") + e.what());
  }
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out << checkpoint_to_json(ckpt).dump() << '\n';
  if (!out) throw IoError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("corrupt checkpoint " + path + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace rqa
