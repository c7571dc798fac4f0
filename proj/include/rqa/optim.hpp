#pragma once

#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

#include "rqa/grad_check.hpp"
#include "rqa/tensor.hpp"

namespace rqa {

enum class OptimizerKind { Sgd, Adam };

std::string_view optimizer_name(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view name);

/// Updates parameters in place from their accumulated gradients. Parameters
/// with no gradient buffer are skipped.
class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void step(const std::vector<NamedParam>& params) = 0;
};

class Sgd : public Optimizer {
 public:
  explicit Sgd(double lr);
  void step(const std::vector<NamedParam>& params) override;

 private:
  double lr_;
};

class Adam : public Optimizer {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(const std::vector<NamedParam>& params) override;
  std::size_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

std::unique_ptr<Optimizer> make_optimizer(OptimizerKind kind, double lr);

}  // namespace rqa
