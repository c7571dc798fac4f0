#include "rqa/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace rqa {

namespace {

double evaluate(const LossFn& loss) {
  Tape tape;
  return loss(tape)->data.at(0);
}

}  // namespace

GradCheckReport grad_check(const LossFn& loss, const std::vector<NamedParam>& params, double step,
                           double tol) {
  for (const auto& [name, p] : params) p->zero_grad();
  {
    Tape tape;
    auto out = loss(tape);
    tape.backward(out);
  }

  GradCheckReport report;
  report.tolerance = tol;
  for (const auto& [name, p] : params) {
    GradCheckEntry entry;
    entry.name = name;
    entry.count = p->size();
    const std::vector<double> analytic = p->has_grad() ? p->grad : std::vector<double>(p->size(), 0.0);
    for (std::size_t i = 0; i < p->size(); ++i) {
      const double saved = p->data[i];
      p->data[i] = saved + step;
      const double plus = evaluate(loss);
      p->data[i] = saved - step;
      const double minus = evaluate(loss);
      p->data[i] = saved;
      const double numeric = (plus - minus) / (2.0 * step);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), kGradCheckFloor});
      double rel = std::abs(analytic[i] - numeric) / denom;
      if (std::isnan(rel)) rel = INFINITY;
      entry.max_rel_error = std::max(entry.max_rel_error, rel);
    }
    entry.passed = entry.max_rel_error <= tol;
    report.passed = report.passed && entry.passed;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace rqa
