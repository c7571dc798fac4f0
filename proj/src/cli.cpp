#include "rqa/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rqa/errors.hpp"
#include "rqa/experiments.hpp"
#include "rqa/synthetic.hpp"
#include "rqa/train.hpp"

namespace rqa::cli {
namespace {

const std::vector<std::string> kModelNames = {"semi-ian", "ian-plus", "lstm-a",  "lstm-aq",
                                              "bilstm-a", "bilstm-aq", "bow-lr", "rule"};

struct ModelFlags {
  std::string task = "tf";
  std::string model = "semi-ian";
  std::size_t k = 1;
  double rho_lex = 1.0;
  double rho_opt = 1.0;
  std::size_t hidden = 64;
  std::size_t word_dim = 300;
  bool no_extra = false;
  std::string candidate = "tanh";
  double dropout = 0.2;
  bool freeze = false;
  std::string lexicon;

  void add(CLI::App& app) {
    app.add_option("--task", task, "Question type")->check(CLI::IsMember({"tf", "mc"}))->capture_default_str();
    app.add_option("--model", model, "Model variant")->check(CLI::IsMember(kModelNames))->capture_default_str();
    app.add_option("--k", k, "Block width of the rho-hot encodings")->check(CLI::Range(1, 1 << 20))->capture_default_str();
    app.add_option("--rho-lex", rho_lex, "Lexical embedding value rho")->capture_default_str();
    app.add_option("--rho-opt", rho_opt, "Option embedding value rho (MC)")->capture_default_str();
    app.add_option("--hidden", hidden, "LSTM hidden size H")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--word-dim", word_dim, "Word embedding width")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_flag("--no-extra-embedding", no_extra, "Drop lexical/option embeddings (ablation O setting)");
    app.add_option("--candidate", candidate, "LSTM candidate activation")
        ->check(CLI::IsMember({"tanh", "sigmoid"}))
        ->capture_default_str();
    app.add_option("--dropout", dropout, "Head-input dropout during training")->capture_default_str();
    app.add_flag("--freeze-embeddings", freeze, "Keep word embeddings fixed during training");
    app.add_option("--lexicon", lexicon, "Keyword lexicon JSON (default: built-in starter lexicon)");
  }

  ModelConfig config() const {
    ModelConfig c;
    c.variant = parse_variant(model);
    c.task = parse_task(task);
    c.hidden = hidden;
    c.word_dim = word_dim;
    c.lexical = {k, rho_lex};
    c.rho_option = rho_opt;
    c.use_extra_embedding = !no_extra;
    c.candidate = parse_candidate(candidate);
    c.dropout = dropout;
    c.freeze_embeddings = freeze;
    c.validate();
    return c;
  }

  Lexicon load_lexicon() const { return lexicon.empty() ? Lexicon::starter() : Lexicon::load(lexicon); }
};

struct TrainFlags {
  TrainConfig cfg;
  std::string optimizer = "adam";
  std::string bow_input = "a";
  std::string rules;
  std::string embeddings;

  void add(CLI::App& app) {
    app.add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str();
    app.add_option("--lr", cfg.lr, "Learning rate (neural models)")->capture_default_str();
    app.add_option("--batch", cfg.batch_size, "Mini-batch size")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app.add_option("--optimizer", optimizer, "Optimizer")->check(CLI::IsMember({"sgd", "adam"}))->capture_default_str();
    app.add_option("--patience", cfg.patience, "Early-stop patience in epochs (0 disables)")->capture_default_str();
    app.add_option("--holdout", cfg.holdout, "Held-out fraction of training questions")->capture_default_str();
    app.add_option("--min-count", cfg.min_count, "Keep tokens seen more than this many times")->capture_default_str();
    app.add_option("--bow-input", bow_input, "BOW features: answer (a) or question+answer (aq)")
        ->check(CLI::IsMember({"a", "aq"}))
        ->capture_default_str();
    app.add_option("--bow-lr", cfg.bow_lr, "Learning rate of the BOW softmax regression")->capture_default_str();
    app.add_option("--rules", rules, "Rule-baseline keyword table JSON (default: built-in)");
    app.add_option("--embeddings", embeddings, "Pretrained word vectors (text: token v1 ... vd)");
  }

  TrainConfig config() {
    TrainConfig c = cfg;
    c.optimizer = parse_optimizer(optimizer);
    c.bow_input = parse_bow_input(bow_input);
    if (!rules.empty()) c.rules = RuleTable::load(rules);
    if (!embeddings.empty()) c.embeddings_path = embeddings;
    c.validate();
    return c;
  }
};

std::vector<Instance> load_instances(const std::string& path, Task task, Labels labels = Labels::Required) {
  return task == Task::TF ? to_instances(load_tf_dataset(path, labels)) : to_instances(load_mc_dataset(path, labels));
}

/// Writes to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("failed writing " + path);
}

std::string accuracy_header() { return "model\tsetting\taccuracy\n"; }

std::string accuracy_rows(const std::string& model, const std::string& setting, const EvalReport& r) {
  std::ostringstream os;
  if (r.task == Task::MC) {
    os << model << '\t' << setting << ":per-option\t" << format_accuracy(r.metrics.accuracy()) << '\n';
    os << model << '\t' << setting << ":exact-match\t" << format_accuracy(r.exact_match.value_or(0.0)) << '\n';
  } else {
    os << model << '\t' << setting << '\t' << format_accuracy(r.metrics.accuracy()) << '\n';
  }
  return os.str();
}

std::string metrics_block(const std::string& model, const Metrics& m) {
  std::ostringstream os;
  os << "model\tgold\\predicted\tfalse\ttrue\tuncertain\tprecision\trecall\n";
  for (std::size_t g = 0; g < kNumClasses; ++g) {
    const auto l = static_cast<Label>(g);
    os << model << '\t' << label_name(l);
    for (std::size_t p = 0; p < kNumClasses; ++p) os << '\t' << m.confusion[g][p];
    os << '\t' << format_accuracy(m.precision(l)) << '\t' << format_accuracy(m.recall(l)) << '\n';
  }
  return os.str();
}

// ---- commands ---------------------------------------------------------------

struct Context {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

int cmd_train(ModelFlags& mf, TrainFlags& tf, const std::string& data, const std::string& test,
              const std::string& checkpoint, const std::string& out_path, bool quiet, Context& ctx) {
  const auto mc = mf.config();
  const auto cfg = tf.config();
  const auto train_set = load_instances(data, mc.task);
  std::optional<std::vector<Instance>> test_set;
  if (!test.empty()) test_set = load_instances(test, mc.task);

  auto ckpt = train(mc, train_set, cfg, mf.load_lexicon(), [&](const EpochLog& log) {
    if (quiet) return;
    ctx.err << "epoch " << log.epoch << "\tloss " << format_accuracy(log.loss);
    if (log.heldout_accuracy) ctx.err << "\theldout " << format_accuracy(*log.heldout_accuracy);
    ctx.err << '\n';
  });
  std::string report = accuracy_header();
  const std::string name(variant_name(mc.variant));
  if (ckpt.meta.final_metrics.contains("heldout")) {
    const auto& h = ckpt.meta.final_metrics["heldout"];
    EvalReport hr;
    hr.task = mc.task;
    hr.metrics.confusion = h["metrics"]["confusion"].get<decltype(hr.metrics.confusion)>();
    if (h.contains("exact_match")) hr.exact_match = h["exact_match"].get<double>();
    report += accuracy_rows(name, "heldout", hr);
  }
  if (test_set) {
    const auto r = evaluate(ckpt, *test_set);
    ckpt.meta.final_metrics["test"] = r.to_json();
    report += accuracy_rows(name, "test", r);
  }
  save_checkpoint(ckpt, checkpoint);
  emit(out_path, report, ctx.out);
  return kExitOk;
}

int cmd_eval(const std::vector<std::string>& checkpoints, const std::string& data, const std::string& setting,
             const std::string& out_path, const std::string& task_override, Context& ctx) {
  std::string table = accuracy_header();
  std::string details;
  std::map<Task, std::vector<Instance>> cache;
  for (const auto& path : checkpoints) {
    const auto ckpt = load_checkpoint(path);
    if (!task_override.empty() && parse_task(task_override) != ckpt.config.task) {
      throw UsageError("--task " + task_override + " does not match checkpoint " + path + " (task " +
                       std::string(task_name(ckpt.config.task)) + ")");
    }
    auto it = cache.find(ckpt.config.task);
    if (it == cache.end()) it = cache.emplace(ckpt.config.task, load_instances(data, ckpt.config.task)).first;
    const auto r = evaluate(ckpt, it->second);
    const std::string name(variant_name(ckpt.config.variant));
    table += accuracy_rows(name, setting, r);
    details += "\n" + metrics_block(name, r.metrics);
  }
  emit(out_path, table + details, ctx.out);
  return kExitOk;
}

int cmd_predict(const std::string& checkpoint, const std::string& data, const std::string& out_path,
                const std::string& task_override, Context& ctx) {
  const auto ckpt = load_checkpoint(checkpoint);
  const Task task = ckpt.config.task;
  if (!task_override.empty() && parse_task(task_override) != task) {
    throw UsageError("--task " + task_override + " does not match the checkpoint (task " +
                     std::string(task_name(task)) + ")");
  }
  std::ostringstream os;
  if (task == Task::TF) {
    const auto examples = load_tf_dataset(data, Labels::Optional);
    const auto instances = to_instances(examples);
    const auto probs = ckpt.predict_probs(instances);
    for (std::size_t i = 0; i < examples.size(); ++i) {
      const auto label = argmax_label(probs[i]);
      nlohmann::ordered_json j;
      j["id"] = examples[i].id;
      j["label"] = static_cast<int>(label);
      j["label_name"] = std::string(label_name(label));
      j["probs"] = probs[i];
      os << j.dump() << '\n';
    }
  } else {
    const auto examples = load_mc_dataset(data, Labels::Optional);
    const auto instances = to_instances(examples);
    const auto labels = ckpt.predict(instances);
    const auto grouped = group_labels(instances, labels);
    for (std::size_t i = 0; i < examples.size(); ++i) {
      nlohmann::ordered_json j;
      j["id"] = examples[i].id;
      std::vector<std::string> per_option;
      for (auto l : grouped[i]) per_option.emplace_back(label_name(l));
      j["per_option"] = per_option;
      j["final"] = aggregate(grouped[i]).to_json();
      os << j.dump() << '\n';
    }
  }
  emit(out_path, os.str(), ctx.out);
  return kExitOk;
}

/// Toy instance for gradient checks: three question and three answer tokens.
std::vector<Instance> toy_instances(Task task) {
  Instance inst;
  inst.group = "toy";
  if (task == Task::TF) {
    inst.question = {"are", "you", "ok"};
    inst.answer = {"yes", "of", "course"};
    inst.label = Label::True;
  } else {
    inst.question = {"tea", "or", "coffee"};
    inst.answer = {"tea", "not", "coffee"};
    inst.option = Span{0, 1};
    inst.num_options = 2;
    inst.label = Label::True;
  }
  return {inst};
}

int cmd_gradcheck(ModelFlags& mf, std::uint64_t seed, double step, double tol, const std::string& out_path,
                  Context& ctx) {
  auto mc = mf.config();
  if (!is_neural(mc.variant)) throw UsageError("gradcheck needs a neural model, got " + mf.model);
  mc.dropout = 0.0;
  const auto data = toy_instances(mc.task);
  std::vector<Tokens> corpus;
  for (const auto& i : data) {
    corpus.push_back(i.question);
    corpus.push_back(i.answer);
  }
  const auto vocab = Vocabulary::build(corpus, 0);
  Rng rng(seed);
  Model model(mc, vocab.size(), mf.load_lexicon(), rng);
  // The zero-initialized head would make every upstream gradient vanish, so
  // all parameters, head included, are redrawn from the seeded generator.
  for (const auto& [name, p] : model.parameters())
    for (auto& v : p->data) v = rng.uniform(-0.5, 0.5);
  const auto batch = make_batch(data, {0}, vocab);
  const auto report = grad_check(
      [&](Tape& tape) { return cross_entropy(tape, model.forward(tape, batch), batch.labels); }, model.parameters(),
      step, tol);
  std::ostringstream os;
  os << "parameter\tcount\tmax_rel_error\tresult\n";
  for (const auto& e : report.entries) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", e.max_rel_error);
    os << e.name << '\t' << e.count << '\t' << buf << '\t' << (e.passed ? "PASS" : "FAIL") << '\n';
  }
  os << "overall\t-\t-\t" << (report.passed ? "PASS" : "FAIL") << '\n';
  emit(out_path, os.str(), ctx.out);
  return report.passed ? kExitOk : kExitError;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

int cmd_demo(const std::string& checkpoint, std::string question, std::vector<std::string> options, Context& ctx) {
  const auto ckpt = load_checkpoint(checkpoint);
  const bool mc = ckpt.config.task == Task::MC;
  std::string line;
  if (question.empty()) {
    ctx.out << "question> " << std::flush;
    if (!std::getline(ctx.in, line)) return kExitOk;
    question = trim(line);
  }
  if (mc && options.empty()) {
    ctx.out << "options (comma-separated)> " << std::flush;
    if (!std::getline(ctx.in, line)) return kExitOk;
    std::stringstream ss(line);
    for (std::string o; std::getline(ss, o, ',');)
      if (!trim(o).empty()) options.push_back(trim(o));
  }
  const Tokens q = tokenize(question);
  if (q.empty()) throw UsageError("demo needs a non-empty question");
  MCExample example;
  if (mc) {
    if (options.empty()) throw UsageError("demo on an MC checkpoint needs at least one --option");
    example.question = q;
    for (const auto& o : options) example.options.push_back(resolve_span(q, tokenize(o), example.options));
    example.labels.assign(options.size(), Label::Uncertain);
  }
  ctx.out << "question: " << join_tokens(q) << '\n';
  while (true) {
    ctx.out << "answer> " << std::flush;
    if (!std::getline(ctx.in, line)) break;
    line = trim(line);
    if (line.empty()) continue;
    if (line == ":quit" || line == ":q") break;
    const Tokens a = tokenize(line);
    if (!mc) {
      Instance inst;
      inst.group = "demo";
      inst.question = q;
      inst.answer = a;
      const auto p = ckpt.predict_probs({inst}).front();
      const auto l = argmax_label(p);
      ctx.out << "label: " << label_name(l) << " (" << static_cast<int>(l) << ")\tp=[" << format_accuracy(p[0])
              << ", " << format_accuracy(p[1]) << ", " << format_accuracy(p[2]) << "]\n";
      continue;
    }
    example.answer = a;
    const auto pred = run_mc_inference(
        [&](const OptionSubtask& s) { return ckpt.predict({to_instance(s)}).front(); }, example);
    for (std::size_t i = 0; i < options.size(); ++i)
      ctx.out << "  option" << i + 1 << " (" << options[i] << "): " << label_name(pred.per_option[i]) << '\n';
    ctx.out << "final: " << pred.final.to_string() << '\n';
  }
  return kExitOk;
}

std::vector<ModelConfig> ablation_models(const std::vector<std::string>& names, const ModelFlags& mf) {
  std::vector<ModelConfig> out;
  for (const auto& n : names) {
    ModelFlags f = mf;
    f.model = n;
    f.no_extra = false;
    out.push_back(f.config());
  }
  return out;
}

int dispatch(const std::vector<std::string>& argv, Context& ctx) {
  CLI::App app{"Answer-understanding toolkit for machine-asked questions: train, evaluate and inspect classifiers.",
               "rqa"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  ModelFlags mf;
  TrainFlags tf;
  std::string data, test, checkpoint, out_path, setting = "test", task_override;
  std::vector<std::string> checkpoints, options, models = {"bilstm-aq", "ian-plus", "semi-ian"};
  std::string question;
  bool quiet = false;
  std::uint64_t seed = 1;
  double step = 1e-5, tol = 1e-4;
  std::size_t n_train = 2000, n_test = 500;

  auto* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint plus a metrics TSV");
  mf.add(*train_cmd);
  tf.add(*train_cmd);
  train_cmd->add_option("--data", data, "Training JSONL")->required();
  train_cmd->add_option("--test", test, "Optional test JSONL evaluated after training");
  train_cmd->add_option("--checkpoint", checkpoint, "Checkpoint output path")->required();
  train_cmd->add_option("--out", out_path, "Metrics TSV path (default: stdout)");
  train_cmd->add_flag("--quiet", quiet, "Suppress per-epoch progress on stderr");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate checkpoints; prints a model/setting/accuracy TSV");
  eval_cmd->add_option("--checkpoint", checkpoints, "Checkpoint path (repeatable)")->required();
  eval_cmd->add_option("--data", data, "Labelled JSONL")->required();
  eval_cmd->add_option("--setting", setting, "Setting column label")->capture_default_str();
  eval_cmd->add_option("--task", task_override, "Expected task (checked against the checkpoint)")
      ->check(CLI::IsMember({"tf", "mc"}));
  eval_cmd->add_option("--out", out_path, "Report path (default: stdout)");

  auto* predict_cmd = app.add_subcommand("predict", "Write JSONL predictions, one line per input example");
  predict_cmd->add_option("--checkpoint", checkpoint, "Checkpoint path")->required();
  predict_cmd->add_option("--data", data, "Input JSONL (labels optional)")->required();
  predict_cmd->add_option("--task", task_override, "Expected task (checked against the checkpoint)")
      ->check(CLI::IsMember({"tf", "mc"}));
  predict_cmd->add_option("--out", out_path, "Output JSONL path (default: stdout)");

  auto* grid_cmd = app.add_subcommand("gridsearch", "Train over the (k, rho) grid; writes a TSV report");
  mf.add(*grid_cmd);
  tf.add(*grid_cmd);
  grid_cmd->add_option("--data", data, "Training JSONL")->required();
  grid_cmd->add_option("--test", test, "Optional test JSONL scored at every point");
  grid_cmd->add_option("--out", out_path, "Report path (default: stdout)");
  grid_cmd->add_option("--jobs", tf.cfg.jobs, "Grid points trained concurrently")->capture_default_str();
  grid_cmd->add_option("--subsample", tf.cfg.grid_subsample, "Evaluate a seeded subset of this many points (0 = all)")
      ->capture_default_str();
  grid_cmd->add_option("--grid-k", tf.cfg.grid_k, "k values")->capture_default_str();
  grid_cmd->add_option("--grid-rho-lex", tf.cfg.grid_rho_lex, "rho_lex values")->capture_default_str();
  grid_cmd->add_option("--grid-rho-opt", tf.cfg.grid_rho_opt, "rho_opt values (MC)")->capture_default_str();

  auto* abl_cmd = app.add_subcommand("ablation", "Train each model with (W) and without (O) extra embeddings");
  mf.add(*abl_cmd);
  tf.add(*abl_cmd);
  abl_cmd->add_option("--data", data, "Training JSONL")->required();
  abl_cmd->add_option("--test", test, "Test JSONL shared by all rows")->required();
  abl_cmd->add_option("--models", models, "Neural models to compare")
      ->check(CLI::IsMember({"semi-ian", "ian-plus", "lstm-a", "lstm-aq", "bilstm-a", "bilstm-aq"}))
      ->capture_default_str();
  abl_cmd->add_option("--out", out_path, "Report path (default: stdout)");

  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference check of every parameter group on a toy instance");
  ModelFlags gmf;
  gmf.hidden = 3;
  gmf.word_dim = 4;
  gmf.add(*gc_cmd);
  gc_cmd->add_option("--seed", seed, "Parameter seed")->capture_default_str();
  gc_cmd->add_option("--step", step, "Central-difference step")->capture_default_str();
  gc_cmd->add_option("--tol", tol, "Relative-error tolerance")->capture_default_str();
  gc_cmd->add_option("--out", out_path, "Report path (default: stdout)");

  auto* gen_cmd = app.add_subcommand("gensynth", "Generate a seeded synthetic dataset");
  std::string gen_task = "tf";
  gen_cmd->add_option("--task", gen_task, "Question type")->check(CLI::IsMember({"tf", "mc"}))->capture_default_str();
  gen_cmd->add_option("--train", n_train, "Training examples")->capture_default_str();
  gen_cmd->add_option("--test", n_test, "Test examples")->capture_default_str();
  gen_cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--out", out_path, "Output directory")->required();

  auto* demo_cmd = app.add_subcommand("demo", "Fix a question, then classify each answer typed on stdin");
  demo_cmd->add_option("--checkpoint", checkpoint, "Checkpoint path")->required();
  demo_cmd->add_option("--question", question, "The machine's question (prompted when absent)");
  demo_cmd->add_option("--option", options, "MC option text (repeatable; prompted when absent)");

  try {
    std::vector<std::string> args(argv.rbegin(), argv.rend() - (argv.empty() ? 0 : 1));
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, ctx.out, ctx.err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (train_cmd->parsed()) return cmd_train(mf, tf, data, test, checkpoint, out_path, quiet, ctx);
  if (eval_cmd->parsed()) return cmd_eval(checkpoints, data, setting, out_path, task_override, ctx);
  if (predict_cmd->parsed()) return cmd_predict(checkpoint, data, out_path, task_override, ctx);
  if (grid_cmd->parsed()) {
    const auto mc = mf.config();
    const auto cfg = tf.config();
    const auto train_set = load_instances(data, mc.task);
    std::optional<std::vector<Instance>> test_set;
    if (!test.empty()) test_set = load_instances(test, mc.task);
    const auto report = grid_search(mc, train_set, test_set ? &*test_set : nullptr, cfg, mf.load_lexicon());
    emit(out_path, report.to_tsv(), ctx.out);
    return report.best ? kExitOk : kExitError;
  }
  if (abl_cmd->parsed()) {
    const auto task = parse_task(mf.task);
    const auto cfg = tf.config();
    const auto report = ablation(ablation_models(models, mf), load_instances(data, task), load_instances(test, task),
                                 cfg, mf.load_lexicon());
    emit(out_path, report.to_tsv(), ctx.out);
    return kExitOk;
  }
  if (gc_cmd->parsed()) return cmd_gradcheck(gmf, seed, step, tol, out_path, ctx);
  if (gen_cmd->parsed()) {
    const auto paths = generate_synthetic(parse_task(gen_task), n_train, n_test, seed, out_path);
    ctx.out << paths.train << '\n' << paths.test << '\n';
    return kExitOk;
  }
  if (demo_cmd->parsed()) return cmd_demo(checkpoint, question, options, ctx);
  return kExitUsage;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::istream& in, std::ostream& out, std::ostream& err) {
  Context ctx{in, out, err};
  try {
    return dispatch(argv, ctx);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace rqa::cli
