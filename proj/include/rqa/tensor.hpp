#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace rqa {

using Shape = std::vector<std::size_t>;
using Mask = std::vector<bool>;

std::size_t num_elements(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Dense float64 array, row-major. Rank 0 (scalar), 1 (vector) and 2
/// (matrix) are supported by the operations below. A rank-1 tensor of
/// length n behaves as a 1 x n row where a matrix is expected.
struct Tensor {
  Shape shape;
  std::vector<double> data;
  bool requires_grad = false;
  std::vector<double> grad;  // empty until something accumulates into it

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  bool has_grad() const { return !grad.empty(); }
  std::vector<double>& ensure_grad();
  void zero_grad();

  double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }
};

/// Graph handle. Parameters and intermediate values are both Vars; the tape
/// keeps recorded intermediates alive until it is cleared.
using Var = std::shared_ptr<Tensor>;

Var make_tensor(Shape shape, std::vector<double> data, bool requires_grad = false);
Var zeros(Shape shape, bool requires_grad = false);
Var full(Shape shape, double value);
Var scalar(double value, bool requires_grad = false);

/// Records differentiable operations in creation order. Since every op's
/// inputs exist before the op is recorded, creation order is a topological
/// order and backward() is a single reverse sweep.
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  Tape() = default;
  /// A non-recording tape computes values only (inference).
  explicit Tape(bool recording) : recording_(recording) {}
  bool recording() const { return recording_; }

  void record(Var output, std::vector<Var> inputs, BackwardFn backward);

  /// Seeds d(loss)/d(loss) = 1 and propagates. Gradients accumulate into
  /// every requires_grad tensor reachable from the loss.
  void backward(const Var& loss);

  std::size_t size() const { return ops_.size(); }
  void clear() { ops_.clear(); }

 private:
  struct Op {
    Var output;
    std::vector<Var> inputs;
    BackwardFn backward;
  };
  std::vector<Op> ops_;
  bool recording_ = true;
};

// ---- operations -----------------------------------------------------------
// All operations check shapes and throw DimensionError on mismatch. Nothing
// broadcasts implicitly; add_row is the only broadcasting op.

Var matmul(Tape& tape, const Var& a, const Var& b);
Var transpose(Tape& tape, const Var& a);

Var add(Tape& tape, const Var& a, const Var& b);
Var sub(Tape& tape, const Var& a, const Var& b);
Var mul(Tape& tape, const Var& a, const Var& b);
Var scale(Tape& tape, const Var& a, double factor);

/// a[m x n] + bias broadcast over rows; bias has n elements.
Var add_row(Tape& tape, const Var& a, const Var& bias);

Var sigmoid(Tape& tape, const Var& a);
Var tanh(Tape& tape, const Var& a);

/// Softmax over each row of `logits` restricted to positions where `mask`
/// is true. Masked positions are exactly zero. For rank-1 input the whole
/// vector is one row. Throws EmptySupportError if a row has no true entry.
Var masked_softmax(Tape& tape, const Var& logits, const Mask& mask);
Var softmax(Tape& tape, const Var& logits);

/// Mean of the unmasked rows of h[n x d]; result has shape {d}.
Var masked_mean(Tape& tape, const Var& h, const Mask& mask);

/// Concatenate along axis 0 (rows) or 1 (columns). Rank-1 inputs concatenate
/// along their only axis. Zero-width inputs are allowed.
Var concat(Tape& tape, const std::vector<Var>& parts, std::size_t axis);

inline constexpr double kLogClamp = 1e-12;

/// -log(max(p[label], 1e-12)) for a rank-1 distribution.
Var cross_entropy(Tape& tape, const Var& probs, std::size_t label);
/// Mean of per-row cross entropies for probs[m x c].
Var cross_entropy(Tape& tape, const Var& probs, const std::vector<std::size_t>& labels);

/// Rows of table[V x d] selected by index; backward scatter-adds.
Var gather_rows(Tape& tape, const Var& table, const std::vector<std::size_t>& indices);

/// Row i of the result is a_i where row_mask[i], else b_i.
Var where_rows(Tape& tape, const Mask& row_mask, const Var& a, const Var& b);

/// out[i, j] = a[i, j] * s[i] for s of m elements.
Var scale_rows(Tape& tape, const Var& a, const Var& s);

/// Per-row sums: a[m x n] -> [m x 1].
Var row_sum(Tape& tape, const Var& a);

/// Column j of a[m x n] as [m x 1].
Var column(Tape& tape, const Var& a, std::size_t j);

/// Sum of all elements, as a scalar.
Var sum(Tape& tape, const Var& a);

}  // namespace rqa
