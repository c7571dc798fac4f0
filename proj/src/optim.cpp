#include "rqa/optim.hpp"

#include <cmath>
#include <string>

#include "rqa/errors.hpp"

namespace rqa {

std::string_view optimizer_name(OptimizerKind k) { return k == OptimizerKind::Sgd ? "sgd" : "adam"; }

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw UsageError("unknown optimizer '" + std::string(name) + "' (expected sgd or adam)");
}

Sgd::Sgd(double lr) : lr_(lr) {
  if (!(lr > 0.0)) throw ValidationError("learning rate must be > 0");
}

void Sgd::step(const std::vector<NamedParam>& params) {
  for (const auto& [name, p] : params) {
    if (!p->has_grad()) continue;
    for (std::size_t i = 0; i < p->size(); ++i) p->data[i] -= lr_ * p->grad[i];
  }
}

Adam::Adam(double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (!(lr > 0.0)) throw ValidationError("learning rate must be > 0");
}

void Adam::step(const std::vector<NamedParam>& params) {
  if (m_.empty()) {
    m_.resize(params.size());
    v_.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i].assign(params[i].second->size(), 0.0);
      v_[i].assign(params[i].second->size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw ValidationError("Adam: parameter list changed between steps");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k].second;
    if (!p.has_grad()) continue;
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = p.grad[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
      p.data[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
}

std::unique_ptr<Optimizer> make_optimizer(OptimizerKind kind, double lr) {
  if (kind == OptimizerKind::Sgd) return std::make_unique<Sgd>(lr);
  return std::make_unique<Adam>(lr);
}

}  // namespace rqa
