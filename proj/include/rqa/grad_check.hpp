#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rqa/tensor.hpp"

namespace rqa {

struct GradCheckEntry {
  std::string name;
  std::size_t count = 0;
  double max_rel_error = 0.0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double tolerance = 0.0;
  bool passed = true;
};

using NamedParam = std::pair<std::string, Var>;
using LossFn = std::function<Var(Tape&)>;

/// Compares analytic gradients of `loss` against central differences for
/// every element of every parameter. Relative error per element is
/// |analytic - numeric| / max(|analytic|, |numeric|, floor); the floor keeps
/// near-zero gradients from turning round-off into relative noise. The
/// analytic gradients are left in the parameters' grad buffers.
GradCheckReport grad_check(const LossFn& loss, const std::vector<NamedParam>& params,
                           double step = 1e-5, double tol = 1e-4);

inline constexpr double kGradCheckFloor = 1e-4;

}  // namespace rqa
