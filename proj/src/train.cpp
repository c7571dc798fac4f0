#include "rqa/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "rqa/embeddings.hpp"
#include "rqa/errors.hpp"
#include "rqa/random.hpp"

namespace rqa {

std::vector<std::size_t> default_grid_k() { return {1, 2, 4, 8, 16}; }

std::vector<double> default_grid_rho() {
  std::vector<double> r;
  for (int i = 1; i <= 10; ++i) r.push_back(i / 10.0);
  return r;
}

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ValidationError("learning rate must be > 0");
  if (!(bow_lr > 0.0)) throw ValidationError("BOW learning rate must be > 0");
  if (batch_size == 0) throw ValidationError("batch size must be >= 1");
  if (!(holdout >= 0.0 && holdout < 1.0)) throw ValidationError("holdout fraction must be in [0, 1)");
  if (jobs == 0) throw ValidationError("jobs must be >= 1");
  const auto ks = default_grid_k();
  for (auto k : grid_k)
    if (std::find(ks.begin(), ks.end(), k) == ks.end())
      throw ValidationError("grid k value " + std::to_string(k) + " outside {1, 2, 4, 8, 16}");
  const auto rhos = default_grid_rho();
  for (const auto* grid : {&grid_rho_lex, &grid_rho_opt})
    for (auto r : *grid)
      if (std::find(rhos.begin(), rhos.end(), r) == rhos.end())
        throw ValidationError("grid rho value " + std::to_string(r) + " outside {0.1, ..., 1.0}");
}

nlohmann::ordered_json TrainConfig::to_json() const {
  nlohmann::ordered_json j;
  j["lr"] = lr;
  j["epochs"] = epochs;
  j["batch_size"] = batch_size;
  j["seed"] = seed;
  j["optimizer"] = std::string(optimizer_name(optimizer));
  j["patience"] = patience;
  j["holdout"] = holdout;
  j["min_count"] = min_count;
  j["bow_input"] = std::string(bow_input_name(bow_input));
  j["bow_lr"] = bow_lr;
  j["embeddings"] = embeddings_path ? nlohmann::ordered_json(*embeddings_path) : nlohmann::ordered_json();
  return j;
}

Metrics Metrics::from(const std::vector<Label>& gold, const std::vector<Label>& predicted) {
  if (gold.size() != predicted.size()) {
    throw DimensionError("evaluate: " + std::to_string(gold.size()) + " gold labels vs " +
                         std::to_string(predicted.size()) + " predictions");
  }
  Metrics m;
  for (std::size_t i = 0; i < gold.size(); ++i)
    ++m.confusion[static_cast<std::size_t>(gold[i])][static_cast<std::size_t>(predicted[i])];
  return m;
}

std::size_t Metrics::total() const {
  std::size_t n = 0;
  for (const auto& row : confusion)
    for (auto v : row) n += v;
  return n;
}

std::size_t Metrics::correct() const {
  std::size_t n = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) n += confusion[c][c];
  return n;
}

double Metrics::accuracy() const {
  const auto n = total();
  return n == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(n);
}

double Metrics::precision(Label c) const {
  const auto k = static_cast<std::size_t>(c);
  std::size_t predicted = 0;
  for (std::size_t g = 0; g < kNumClasses; ++g) predicted += confusion[g][k];
  return predicted == 0 ? 0.0 : static_cast<double>(confusion[k][k]) / static_cast<double>(predicted);
}

double Metrics::recall(Label c) const {
  const auto k = static_cast<std::size_t>(c);
  std::size_t actual = 0;
  for (std::size_t p = 0; p < kNumClasses; ++p) actual += confusion[k][p];
  return actual == 0 ? 0.0 : static_cast<double>(confusion[k][k]) / static_cast<double>(actual);
}

nlohmann::ordered_json Metrics::to_json() const {
  nlohmann::ordered_json j;
  j["accuracy"] = accuracy();
  j["total"] = total();
  j["confusion"] = confusion;
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto l = static_cast<Label>(c);
    per_class[std::string(label_name(l))] = {{"precision", precision(l)}, {"recall", recall(l)}};
  }
  j["per_class"] = per_class;
  return j;
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["task"] = std::string(task_name(task));
  j["metrics"] = metrics.to_json();
  if (exact_match) j["exact_match"] = *exact_match;
  j["questions"] = questions;
  return j;
}

std::vector<std::vector<Label>> group_labels(const std::vector<Instance>& instances,
                                             const std::vector<Label>& labels) {
  std::map<std::string, std::size_t> slot;
  std::vector<std::vector<Label>> groups;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    auto [it, fresh] = slot.emplace(instances[i].group, groups.size());
    if (fresh) groups.emplace_back(instances[i].num_options, Label::Uncertain);
    auto& g = groups[it->second];
    if (instances[i].option_index >= g.size()) throw IndexError("option index out of range in group " + instances[i].group);
    g[instances[i].option_index] = labels[i];
  }
  return groups;
}

EvalReport evaluate(const Checkpoint& ckpt, const std::vector<Instance>& instances) {
  const bool mc = std::any_of(instances.begin(), instances.end(), [](const Instance& i) { return i.option.has_value(); });
  if (!instances.empty() && mc != (ckpt.config.task == Task::MC)) {
    throw CompatibilityError("checkpoint was trained for task " + std::string(task_name(ckpt.config.task)) +
                             " but the data is " + (mc ? "mc" : "tf"));
  }
  if (ckpt.model && ckpt.model->vocab_size() != ckpt.vocab.size()) {
    throw CompatibilityError("checkpoint vocabulary has " + std::to_string(ckpt.vocab.size()) +
                             " entries, model embedding has " + std::to_string(ckpt.model->vocab_size()));
  }
  std::vector<Label> gold;
  gold.reserve(instances.size());
  for (const auto& inst : instances) gold.push_back(inst.label);
  const auto pred = ckpt.predict(instances);

  EvalReport r;
  r.task = ckpt.config.task;
  r.metrics = Metrics::from(gold, pred);
  if (r.task == Task::MC) {
    const auto g = group_labels(instances, gold);
    const auto p = group_labels(instances, pred);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < g.size(); ++i) hits += aggregate(g[i]) == aggregate(p[i]) ? 1 : 0;
    r.questions = g.size();
    r.exact_match = g.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(g.size());
  } else {
    r.questions = instances.size();
  }
  return r;
}

std::pair<std::vector<Instance>, std::vector<Instance>> holdout_split(const std::vector<Instance>& instances,
                                                                      double fraction, std::uint64_t seed) {
  std::vector<std::string> groups;
  std::set<std::string> seen;
  for (const auto& inst : instances)
    if (seen.insert(inst.group).second) groups.push_back(inst.group);
  std::size_t n_hold = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(groups.size())));
  if (groups.size() < 2 || fraction <= 0.0) n_hold = 0;
  n_hold = std::min(n_hold, groups.size() - (groups.empty() ? 0 : 1));

  Rng rng(seed ^ 0x686f6c646f7574ULL);
  rng.shuffle(groups);
  const std::set<std::string> held(groups.begin(), groups.begin() + static_cast<std::ptrdiff_t>(n_hold));
  std::pair<std::vector<Instance>, std::vector<Instance>> out;
  for (const auto& inst : instances) (held.count(inst.group) ? out.second : out.first).push_back(inst);
  return out;
}

Vocabulary build_vocab(const std::vector<Instance>& instances, std::size_t min_count) {
  std::vector<Tokens> corpus;
  std::set<std::string> questions_seen;
  corpus.reserve(2 * instances.size());
  for (const auto& inst : instances) {
    // Option subtasks repeat their question; count it once per group.
    if (questions_seen.insert(inst.group).second) corpus.push_back(inst.question);
    corpus.push_back(inst.answer);
  }
  return Vocabulary::build(corpus, min_count);
}

namespace {

std::vector<Label> gold_of(const std::vector<Instance>& v) {
  std::vector<Label> g;
  g.reserve(v.size());
  for (const auto& i : v) g.push_back(i.label);
  return g;
}

void train_neural(Checkpoint& ckpt, const std::vector<Instance>& fit, const std::vector<Instance>& held,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  Rng init_rng(cfg.seed);
  std::optional<EmbeddingTable> pretrained;
  if (cfg.embeddings_path) {
    Rng emb_rng(cfg.seed ^ 0x656d62ULL);
    pretrained = load_embeddings(*cfg.embeddings_path, ckpt.vocab, emb_rng, ckpt.config.word_dim);
  }
  ckpt.model = std::make_shared<Model>(ckpt.config, ckpt.vocab.size(), ckpt.lexicon, init_rng,
                                       pretrained ? &*pretrained : nullptr);
  Model& model = *ckpt.model;
  const auto params = model.trainable();
  auto optimizer = make_optimizer(cfg.optimizer, cfg.lr);
  Rng shuffle_rng(cfg.seed + 1);
  Rng dropout_rng(cfg.seed + 2);
  Rng* dropout = ckpt.config.dropout > 0.0 ? &dropout_rng : nullptr;

  std::vector<std::vector<double>> best;
  double best_acc = -1.0;
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (const auto& batch : make_batches(fit, cfg.batch_size, ckpt.vocab, &shuffle_rng)) {
      for (const auto& [name, p] : params) p->zero_grad();
      Tape tape;
      const auto probs = model.forward(tape, batch, dropout);
      const auto loss = cross_entropy(tape, probs, batch.labels);
      const double v = loss->data[0];
      if (std::isnan(v)) throw TrainingError("training diverged: loss is NaN in epoch " + std::to_string(epoch));
      tape.backward(loss);
      optimizer->step(params);
      loss_sum += v * static_cast<double>(batch.size());
      seen += batch.size();
    }
    EpochLog log{epoch, loss_sum / static_cast<double>(seen), std::nullopt};
    ckpt.meta.epoch_loss.push_back(log.loss);
    ckpt.meta.epochs_run = epoch;

    const auto& select_on = held.empty() ? fit : held;
    const double acc = Metrics::from(gold_of(select_on), ckpt.predict(select_on)).accuracy();
    log.heldout_accuracy = acc;
    ckpt.meta.heldout_accuracy.push_back(acc);
    if (on_epoch) on_epoch(log);
    if (acc > best_acc) {
      best_acc = acc;
      ckpt.meta.best_epoch = epoch;
      best.clear();
      for (const auto& [name, p] : model.parameters()) best.push_back(p->data);
      since_best = 0;
    } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
      break;
    }
  }
  if (!best.empty()) {
    const auto all = model.parameters();
    for (std::size_t i = 0; i < all.size(); ++i) all[i].second->data = best[i];
  }
  ckpt.meta.best_heldout_accuracy = std::max(best_acc, 0.0);
}

}  // namespace

Checkpoint train(const ModelConfig& model_config, const std::vector<Instance>& data, const TrainConfig& cfg,
                 const Lexicon& lexicon, const EpochCallback& on_epoch) {
  cfg.validate();
  model_config.validate();
  if (data.empty()) throw ValidationError("training set is empty");
  for (const auto& inst : data) {
    if (inst.option.has_value() != (model_config.task == Task::MC)) {
      throw UsageError("training data does not match task " + std::string(task_name(model_config.task)));
    }
  }
  auto [fit, held] = holdout_split(data, cfg.holdout, cfg.seed);

  Checkpoint ckpt;
  ckpt.config = model_config;
  ckpt.lexicon = lexicon;
  ckpt.vocab = build_vocab(fit, cfg.min_count);
  ckpt.meta.seed = cfg.seed;
  ckpt.meta.train_config = cfg.to_json();

  switch (model_config.variant) {
    case Variant::Rule:
      ckpt.rules = cfg.rules;
      break;
    case Variant::BowLr: {
      BowTrainConfig bc;
      bc.mode = cfg.bow_input;
      bc.epochs = cfg.epochs;
      bc.lr = cfg.bow_lr;
      bc.batch_size = cfg.batch_size;
      bc.seed = cfg.seed;
      ckpt.bow = bow_lr_train(fit, ckpt.vocab, bc);
      ckpt.meta.epochs_run = cfg.epochs;
      break;
    }
    default:
      train_neural(ckpt, fit, held, cfg, on_epoch);
  }
  if (!held.empty()) ckpt.meta.final_metrics["heldout"] = evaluate(ckpt, held).to_json();
  if (model_config.variant == Variant::Rule || model_config.variant == Variant::BowLr)
    ckpt.meta.best_heldout_accuracy = held.empty() ? 0.0 : evaluate(ckpt, held).metrics.accuracy();
  return ckpt;
}

}  // namespace rqa
