#include "rqa/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <thread>

#include "rqa/errors.hpp"
#include "rqa/random.hpp"

namespace rqa {

std::string format_accuracy(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

namespace {

std::string format_rho(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

}  // namespace

std::vector<GridPoint> enumerate_grid(Task task, const TrainConfig& cfg) {
  std::vector<GridPoint> grid;
  for (auto k : cfg.grid_k) {
    for (auto rl : cfg.grid_rho_lex) {
      if (task == Task::TF) {
        grid.push_back({k, rl, std::nullopt});
      } else {
        for (auto ro : cfg.grid_rho_opt) grid.push_back({k, rl, ro});
      }
    }
  }
  if (cfg.grid_subsample > 0 && cfg.grid_subsample < grid.size()) {
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.seed ^ 0x67726964ULL);
    rng.shuffle(order);
    order.resize(cfg.grid_subsample);
    std::sort(order.begin(), order.end());
    std::vector<GridPoint> kept;
    for (auto i : order) kept.push_back(grid[i]);
    grid = std::move(kept);
  }
  return grid;
}

std::string GridReport::to_tsv() const {
  std::ostringstream os;
  os << "model\tk\trho_lex\trho_opt\theldout_accuracy\ttest_accuracy\tstatus\tselected\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    os << variant_name(variant) << '\t' << r.point.k << '\t' << format_rho(r.point.rho_lex) << '\t'
       << (r.point.rho_opt ? format_rho(*r.point.rho_opt) : "-") << '\t'
       << (r.ok ? format_accuracy(r.heldout_accuracy) : "-") << '\t'
       << (r.test_accuracy ? format_accuracy(*r.test_accuracy) : "-") << '\t'
       << (r.ok ? "ok" : "error: " + r.error) << '\t' << (best && *best == i ? "*" : "") << '\n';
  }
  return os.str();
}

GridReport grid_search(const ModelConfig& base, const std::vector<Instance>& train_data,
                       const std::vector<Instance>* test_data, const TrainConfig& cfg, const Lexicon& lexicon) {
  cfg.validate();
  GridReport report;
  report.variant = base.variant;
  report.task = base.task;
  const auto grid = enumerate_grid(base.task, cfg);
  report.results.resize(grid.size());

  auto run_point = [&](std::size_t i) {
    GridResult& r = report.results[i];
    r.point = grid[i];
    ModelConfig mc = base;
    mc.lexical.k = grid[i].k;
    mc.lexical.rho = grid[i].rho_lex;
    if (grid[i].rho_opt) mc.rho_option = *grid[i].rho_opt;
    try {
      const auto ckpt = train(mc, train_data, cfg, lexicon);
      r.heldout_accuracy = ckpt.meta.best_heldout_accuracy;
      if (test_data) r.test_accuracy = evaluate(ckpt, *test_data).metrics.accuracy();
      r.ok = true;
    } catch (const Error& e) {
      r.error = e.what();
    }
  };

  const std::size_t jobs = std::min(cfg.jobs, std::max<std::size_t>(grid.size(), 1));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) run_point(i);
      });
    }
    for (auto& t : workers) t.join();
  }

  for (std::size_t i = 0; i < report.results.size(); ++i) {
    const auto& r = report.results[i];
    if (r.ok && (!report.best || r.heldout_accuracy > report.results[*report.best].heldout_accuracy)) report.best = i;
  }
  return report;
}

std::string split_fingerprint(const std::vector<Instance>& instances) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (const auto& inst : instances) {
    feed(inst.group);
    feed(std::to_string(inst.option_index));
    feed(std::to_string(static_cast<int>(inst.label)));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string AblationReport::to_tsv() const {
  std::ostringstream os;
  os << "model\tsetting\taccuracy";
  if (task == Task::MC) os << "\texact_match";
  os << "\ttest_size\ttest_split\n";
  for (const auto& r : rows) {
    os << r.model << '\t' << r.setting << '\t' << format_accuracy(r.accuracy);
    if (task == Task::MC) os << '\t' << (r.exact_match ? format_accuracy(*r.exact_match) : "-");
    os << '\t' << r.test_size << '\t' << r.test_split << '\n';
  }
  return os.str();
}

AblationReport ablation(const std::vector<ModelConfig>& models, const std::vector<Instance>& train_data,
                        const std::vector<Instance>& test_data, const TrainConfig& cfg, const Lexicon& lexicon) {
  if (models.empty()) throw ValidationError("ablation needs at least one model");
  AblationReport report;
  report.task = models.front().task;
  const auto fingerprint = split_fingerprint(test_data);
  for (const auto& base : models) {
    if (!is_neural(base.variant)) {
      throw UsageError("ablation applies to neural models only, got " + std::string(variant_name(base.variant)));
    }
    for (bool with : {true, false}) {
      ModelConfig mc = base;
      mc.use_extra_embedding = with;
      const auto ckpt = train(mc, train_data, cfg, lexicon);
      const auto r = evaluate(ckpt, test_data);
      report.rows.push_back({std::string(variant_name(base.variant)), with ? 'W' : 'O', r.metrics.accuracy(),
                             r.exact_match, test_data.size(), fingerprint});
    }
  }
  return report;
}

}  // namespace rqa
