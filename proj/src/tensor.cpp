#include "rqa/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rqa/errors.hpp"

namespace rqa {

std::size_t num_elements(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t Tensor::rows() const { return shape.size() == 2 ? shape[0] : 1; }

std::size_t Tensor::cols() const {
  if (shape.size() == 2) return shape[1];
  if (shape.size() == 1) return shape[0];
  return 1;
}

std::vector<double>& Tensor::ensure_grad() {
  if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  return grad;
}

void Tensor::zero_grad() {
  if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
}

Var make_tensor(Shape shape, std::vector<double> data, bool requires_grad) {
  if (num_elements(shape) != data.size()) {
    throw DimensionError("tensor shape " + shape_str(shape) + " does not match " +
                         std::to_string(data.size()) + " values");
  }
  auto t = std::make_shared<Tensor>();
  t->shape = std::move(shape);
  t->data = std::move(data);
  t->requires_grad = requires_grad;
  return t;
}

Var zeros(Shape shape, bool requires_grad) {
  const auto n = num_elements(shape);
  return make_tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Var full(Shape shape, double value) {
  const auto n = num_elements(shape);
  return make_tensor(std::move(shape), std::vector<double>(n, value));
}

Var scalar(double value, bool requires_grad) { return make_tensor({}, {value}, requires_grad); }

void Tape::record(Var output, std::vector<Var> inputs, BackwardFn backward) {
  ops_.push_back(Op{std::move(output), std::move(inputs), std::move(backward)});
}

void Tape::backward(const Var& loss) {
  if (loss->size() != 1) {
    throw DimensionError("backward requires a scalar loss, got shape " + shape_str(loss->shape));
  }
  loss->ensure_grad()[0] += 1.0;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
    if (it->output->has_grad()) it->backward();
  }
}

namespace {

bool any_requires_grad(std::initializer_list<const Var*> vars) {
  for (auto* v : vars) {
    if ((*v)->requires_grad) return true;
  }
  return false;
}

Var make_output(Shape shape, std::vector<double> data, bool requires_grad) {
  auto t = std::make_shared<Tensor>();
  t->shape = std::move(shape);
  t->data = std::move(data);
  t->requires_grad = requires_grad;
  return t;
}

void require_rank2(const Var& a, const char* op) {
  if (a->rank() != 2) {
    throw DimensionError(std::string(op) + " expects a matrix, got shape " + shape_str(a->shape));
  }
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a->shape != b->shape) {
    throw DimensionError(std::string(op) + ": shape mismatch " + shape_str(a->shape) + " vs " +
                         shape_str(b->shape));
  }
}

// Shared forward/backward for unary pointwise ops whose derivative can be
// written in terms of the output.
template <typename Fwd, typename Dy>
Var unary(Tape& tape, const Var& a, Fwd fwd, Dy dy) {
  std::vector<double> out(a->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(a->data[i]);
  auto y = make_output(a->shape, std::move(out), a->requires_grad);
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* ap = a.get();
    tape.record(y, {a}, [yp, ap, dy] {
      auto& ga = ap->ensure_grad();
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += yp->grad[i] * dy(yp->data[i]);
    });
  }
  return y;
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var matmul(Tape& tape, const Var& a, const Var& b) {
  require_rank2(a, "matmul");
  require_rank2(b, "matmul");
  const std::size_t m = a->shape[0], k = a->shape[1], n = b->shape[1];
  if (b->shape[0] != k) {
    throw DimensionError("matmul: inner dimensions differ for " + shape_str(a->shape) + " and " +
                         shape_str(b->shape));
  }
  std::vector<double> out(m * n, 0.0);
  const double* A = a->data.data();
  const double* B = b->data.data();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = A[i * k + p];
      if (av == 0.0) continue;
      const double* brow = B + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
  }
  auto y = make_output({m, n}, std::move(out), any_requires_grad({&a, &b}));
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* ap = a.get();
    Tensor* bp = b.get();
    tape.record(y, {a, b}, [yp, ap, bp, m, k, n] {
      const double* G = yp->grad.data();
      if (ap->requires_grad) {
        auto& ga = ap->ensure_grad();
        const double* B = bp->data.data();
        for (std::size_t i = 0; i < m; ++i) {
          const double* grow = G + i * n;
          for (std::size_t p = 0; p < k; ++p) {
            const double* brow = B + p * n;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
            ga[i * k + p] += acc;
          }
        }
      }
      if (bp->requires_grad) {
        auto& gb = bp->ensure_grad();
        const double* A = ap->data.data();
        for (std::size_t i = 0; i < m; ++i) {
          const double* grow = G + i * n;
          for (std::size_t p = 0; p < k; ++p) {
            const double av = A[i * k + p];
            if (av == 0.0) continue;
            double* gbrow = gb.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) gbrow[j] += av * grow[j];
          }
        }
      }
    });
  }
  return y;
}

Var transpose(Tape& tape, const Var& a) {
  require_rank2(a, "transpose");
  const std::size_t m = a->shape[0], n = a->shape[1];
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a->data[i * n + j];
  auto y = make_output({n, m}, std::move(out), a->requires_grad);
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* ap = a.get();
    tape.record(y, {a}, [yp, ap, m, n] {
      auto& ga = ap->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += yp->grad[j * m + i];
    });
  }
  return y;
}

Var add(Tape& tape, const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->data[i] + b->data[i];
  auto y = make_output(a->shape, std::move(out), any_requires_grad({&a, &b}));
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* ap = a.get();
    Tensor* bp = b.get();
    tape.record(y, {a, b}, [yp, ap, bp] {
      for (Tensor* t : {ap, bp}) {
        if (!t->requires_grad) continue;
        auto& g = t->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += yp->grad[i];
      }
    });
  }
  return y;
}

Var sub(Tape& tape, const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->data[i] - b->data[i];
  auto y = make_output(a->shape, std::move(out), any_requires_grad({&a, &b}));
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* ap = a.get();
    Tensor* bp = b.get();
    tape.record(y, {a, b}, [yp, ap, bp] {
      if (ap->requires_grad) {
        auto& g = ap->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += yp->grad[i];
      }
      if (bp->requires_grad) {
        auto& g = bp->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] -= yp->grad[i];
      }
    });
  }
  return y;
}

Var mul(Tape& tape, const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->data[i] * b->data[i];
  auto y = make_output(a->shape, std::move(out), any_requires_grad({&a, &b}));
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* ap = a.get();
    Tensor* bp = b.get();
    tape.record(y, {a, b}, [yp, ap, bp] {
      if (ap->requires_grad) {
        auto& g = ap->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += yp->grad[i] * bp->data[i];
      }
      if (bp->requires_grad) {
        auto& g = bp->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += yp->grad[i] * ap->data[i];
      }
    });
  }
  return y;
}

Var scale(Tape& tape, const Var& a, double factor) {
  std::vector<double> out(a->size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a->data[i] * factor;
  auto y = make_output(a->shape, std::move(out), a->requires_grad);
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* ap = a.get();
    tape.record(y, {a}, [yp, ap, factor] {
      auto& g = ap->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += yp->grad[i] * factor;
    });
  }
  return y;
}

Var add_row(Tape& tape, const Var& a, const Var& bias) {
  if (a->rank() > 2 || bias->rank() > 2 || bias->rows() != 1 || bias->size() != a->cols()) {
    throw DimensionError("add_row: bias " + shape_str(bias->shape) + " does not match columns of " +
                         shape_str(a->shape));
  }
  const std::size_t m = a->rows(), n = a->cols();
  std::vector<double> out(a->size());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = a->data[i * n + j] + bias->data[j];
  auto y = make_output(a->shape, std::move(out), any_requires_grad({&a, &bias}));
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* ap = a.get();
    Tensor* bp = bias.get();
    tape.record(y, {a, bias}, [yp, ap, bp, m, n] {
      if (ap->requires_grad) {
        auto& g = ap->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += yp->grad[i];
      }
      if (bp->requires_grad) {
        auto& g = bp->ensure_grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) g[j] += yp->grad[i * n + j];
      }
    });
  }
  return y;
}

Var sigmoid(Tape& tape, const Var& a) {
  return unary(tape, a, stable_sigmoid, [](double y) { return y * (1.0 - y); });
}

Var tanh(Tape& tape, const Var& a) {
  return unary(tape, a, [](double x) { return std::tanh(x); }, [](double y) { return 1.0 - y * y; });
}

Var masked_softmax(Tape& tape, const Var& logits, const Mask& mask) {
  if (logits->rank() == 0 || logits->rank() > 2) {
    throw DimensionError("masked_softmax expects a vector or matrix, got " + shape_str(logits->shape));
  }
  if (mask.size() != logits->size()) {
    throw DimensionError("masked_softmax: mask of length " + std::to_string(mask.size()) +
                         " for logits " + shape_str(logits->shape));
  }
  const std::size_t m = logits->rows(), n = logits->cols();
  std::vector<double> out(logits->size(), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const double* x = logits->data.data() + i * n;
    double mx = -INFINITY;
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask[i * n + j]) {
        mx = std::max(mx, x[j]);
        any = true;
      }
    }
    if (!any) throw EmptySupportError("masked_softmax: row " + std::to_string(i) + " is fully masked");
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask[i * n + j]) {
        out[i * n + j] = std::exp(x[j] - mx);
        total += out[i * n + j];
      }
    }
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] /= total;
  }
  auto y = make_output(logits->shape, std::move(out), logits->requires_grad);
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* xp = logits.get();
    tape.record(y, {logits}, [yp, xp, m, n] {
      auto& gx = xp->ensure_grad();
      for (std::size_t i = 0; i < m; ++i) {
        const double* p = yp->data.data() + i * n;
        const double* g = yp->grad.data() + i * n;
        double dot = 0.0;
        for (std::size_t j = 0; j < n; ++j) dot += p[j] * g[j];
        for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += p[j] * (g[j] - dot);
      }
    });
  }
  return y;
}

Var softmax(Tape& tape, const Var& logits) {
  return masked_softmax(tape, logits, Mask(logits->size(), true));
}

Var masked_mean(Tape& tape, const Var& h, const Mask& mask) {
  if (h->rank() != 2 || mask.size() != h->shape[0]) {
    throw DimensionError("masked_mean: mask of length " + std::to_string(mask.size()) + " for " +
                         shape_str(h->shape));
  }
  const std::size_t n = h->shape[0], d = h->shape[1];
  const auto count = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  if (count == 0) throw EmptySupportError("masked_mean: every row is masked");
  const double inv = 1.0 / static_cast<double>(count);
  std::vector<double> out(d, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    if (!mask[t]) continue;
    for (std::size_t j = 0; j < d; ++j) out[j] += h->data[t * d + j];
  }
  for (auto& v : out) v *= inv;
  auto y = make_output({d}, std::move(out), h->requires_grad);
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* hp = h.get();
    tape.record(y, {h}, [yp, hp, mask, n, d, inv] {
      auto& g = hp->ensure_grad();
      for (std::size_t t = 0; t < n; ++t) {
        if (!mask[t]) continue;
        for (std::size_t j = 0; j < d; ++j) g[t * d + j] += yp->grad[j] * inv;
      }
    });
  }
  return y;
}

Var concat(Tape& tape, const std::vector<Var>& parts, std::size_t axis) {
  if (parts.empty()) throw DimensionError("concat of zero tensors");
  const std::size_t rank = parts.front()->rank();
  if (rank == 0 || rank > 2 || axis >= rank) {
    throw DimensionError("concat: axis " + std::to_string(axis) + " invalid for shape " +
                         shape_str(parts.front()->shape));
  }
  for (const auto& p : parts) {
    if (p->rank() != rank) {
      throw DimensionError("concat: rank mismatch " + shape_str(parts.front()->shape) + " vs " +
                           shape_str(p->shape));
    }
  }
  if (parts.size() == 1) return parts.front();

  bool needs_grad = false;
  for (const auto& p : parts) needs_grad = needs_grad || p->requires_grad;

  Shape shape = parts.front()->shape;
  if (rank == 1 || axis == 0) {
    // Row-major contiguous concatenation.
    std::size_t total = 0;
    for (const auto& p : parts) {
      if (rank == 2 && p->shape[1] != shape[1]) {
        throw DimensionError("concat axis 0: column mismatch " + shape_str(parts.front()->shape) +
                             " vs " + shape_str(p->shape));
      }
      total += p->shape[0];
    }
    shape[0] = total;
    std::vector<double> out;
    out.reserve(num_elements(shape));
    for (const auto& p : parts) out.insert(out.end(), p->data.begin(), p->data.end());
    auto y = make_output(shape, std::move(out), needs_grad);
    if (needs_grad && tape.recording()) {
      Tensor* yp = y.get();
      std::vector<Tensor*> raw;
      for (const auto& p : parts) raw.push_back(p.get());
      tape.record(y, parts, [yp, raw] {
        std::size_t offset = 0;
        for (Tensor* p : raw) {
          if (p->requires_grad) {
            auto& g = p->ensure_grad();
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += yp->grad[offset + i];
          }
          offset += p->size();
        }
      });
    }
    return y;
  }

  const std::size_t m = shape[0];
  std::size_t width = 0;
  for (const auto& p : parts) {
    if (p->shape[0] != m) {
      throw DimensionError("concat axis 1: row mismatch " + shape_str(parts.front()->shape) + " vs " +
                           shape_str(p->shape));
    }
    width += p->shape[1];
  }
  shape[1] = width;
  std::vector<double> out(m * width);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t w = p->shape[1];
    for (std::size_t i = 0; i < m; ++i)
      std::copy_n(p->data.data() + i * w, w, out.data() + i * width + offset);
    offset += w;
  }
  auto y = make_output(shape, std::move(out), needs_grad);
  if (needs_grad) {
    Tensor* yp = y.get();
    std::vector<Tensor*> raw;
    for (const auto& p : parts) raw.push_back(p.get());
    tape.record(y, parts, [yp, raw, m, width] {
      std::size_t off = 0;
      for (Tensor* p : raw) {
        const std::size_t w = p->shape[1];
        if (p->requires_grad) {
          auto& g = p->ensure_grad();
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < w; ++j) g[i * w + j] += yp->grad[i * width + off + j];
        }
        off += w;
      }
    });
  }
  return y;
}

Var cross_entropy(Tape& tape, const Var& probs, std::size_t label) {
  if (probs->rank() != 1) {
    throw DimensionError("cross_entropy expects a distribution vector, got " + shape_str(probs->shape));
  }
  return cross_entropy(tape, probs, std::vector<std::size_t>{label});
}

Var cross_entropy(Tape& tape, const Var& probs, const std::vector<std::size_t>& labels) {
  if (probs->rank() == 0 || probs->rank() > 2) {
    throw DimensionError("cross_entropy: bad shape " + shape_str(probs->shape));
  }
  const std::size_t m = probs->rows(), c = probs->cols();
  if (labels.size() != m) {
    throw DimensionError("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(m) + " rows");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (labels[i] >= c) {
      throw IndexError("cross_entropy: label " + std::to_string(labels[i]) + " out of range for " +
                       std::to_string(c) + " classes");
    }
    total -= std::log(std::max(probs->data[i * c + labels[i]], kLogClamp));
  }
  const double inv = 1.0 / static_cast<double>(m);
  auto y = make_output({}, {total * inv}, probs->requires_grad);
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* pp = probs.get();
    tape.record(y, {probs}, [yp, pp, labels, c, inv] {
      auto& g = pp->ensure_grad();
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::size_t idx = i * c + labels[i];
        const double p = pp->data[idx];
        if (p > kLogClamp) g[idx] -= yp->grad[0] * inv / p;
      }
    });
  }
  return y;
}

Var gather_rows(Tape& tape, const Var& table, const std::vector<std::size_t>& indices) {
  require_rank2(table, "gather_rows");
  const std::size_t v = table->shape[0], d = table->shape[1];
  std::vector<double> out(indices.size() * d);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= v) {
      throw IndexError("gather_rows: index " + std::to_string(indices[i]) + " out of range for " +
                       std::to_string(v) + " rows");
    }
    std::copy_n(table->data.data() + indices[i] * d, d, out.data() + i * d);
  }
  auto y = make_output({indices.size(), d}, std::move(out), table->requires_grad);
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* tp = table.get();
    tape.record(y, {table}, [yp, tp, indices, d] {
      auto& g = tp->ensure_grad();
      for (std::size_t i = 0; i < indices.size(); ++i)
        for (std::size_t j = 0; j < d; ++j) g[indices[i] * d + j] += yp->grad[i * d + j];
    });
  }
  return y;
}

Var where_rows(Tape& tape, const Mask& row_mask, const Var& a, const Var& b) {
  require_same_shape(a, b, "where_rows");
  if (row_mask.size() != a->rows()) {
    throw DimensionError("where_rows: mask of length " + std::to_string(row_mask.size()) + " for " +
                         shape_str(a->shape));
  }
  const std::size_t m = a->rows(), n = a->cols();
  std::vector<double> out(a->size());
  for (std::size_t i = 0; i < m; ++i) {
    const auto& src = row_mask[i] ? a->data : b->data;
    std::copy_n(src.data() + i * n, n, out.data() + i * n);
  }
  auto y = make_output(a->shape, std::move(out), any_requires_grad({&a, &b}));
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* ap = a.get();
    Tensor* bp = b.get();
    tape.record(y, {a, b}, [yp, ap, bp, row_mask, m, n] {
      for (std::size_t i = 0; i < m; ++i) {
        Tensor* dst = row_mask[i] ? ap : bp;
        if (!dst->requires_grad) continue;
        auto& g = dst->ensure_grad();
        for (std::size_t j = 0; j < n; ++j) g[i * n + j] += yp->grad[i * n + j];
      }
    });
  }
  return y;
}

Var scale_rows(Tape& tape, const Var& a, const Var& s) {
  if (a->rank() > 2 || s->size() != a->rows()) {
    throw DimensionError("scale_rows: scale " + shape_str(s->shape) + " for " + shape_str(a->shape));
  }
  const std::size_t m = a->rows(), n = a->cols();
  std::vector<double> out(a->size());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = a->data[i * n + j] * s->data[i];
  auto y = make_output(a->shape, std::move(out), any_requires_grad({&a, &s}));
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* ap = a.get();
    Tensor* sp = s.get();
    tape.record(y, {a, s}, [yp, ap, sp, m, n] {
      if (ap->requires_grad) {
        auto& g = ap->ensure_grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) g[i * n + j] += yp->grad[i * n + j] * sp->data[i];
      }
      if (sp->requires_grad) {
        auto& g = sp->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += yp->grad[i * n + j] * ap->data[i * n + j];
          g[i] += acc;
        }
      }
    });
  }
  return y;
}

Var row_sum(Tape& tape, const Var& a) {
  if (a->rank() > 2) throw DimensionError("row_sum: bad shape " + shape_str(a->shape));
  const std::size_t m = a->rows(), n = a->cols();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += a->data[i * n + j];
  auto y = make_output({m, 1}, std::move(out), a->requires_grad);
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* ap = a.get();
    tape.record(y, {a}, [yp, ap, m, n] {
      auto& g = ap->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) g[i * n + j] += yp->grad[i];
    });
  }
  return y;
}

Var column(Tape& tape, const Var& a, std::size_t j) {
  require_rank2(a, "column");
  const std::size_t m = a->shape[0], n = a->shape[1];
  if (j >= n) throw IndexError("column " + std::to_string(j) + " out of range for " + shape_str(a->shape));
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = a->data[i * n + j];
  auto y = make_output({m, 1}, std::move(out), a->requires_grad);
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* ap = a.get();
    tape.record(y, {a}, [yp, ap, m, n, j] {
      auto& g = ap->ensure_grad();
      for (std::size_t i = 0; i < m; ++i) g[i * n + j] += yp->grad[i];
    });
  }
  return y;
}

Var sum(Tape& tape, const Var& a) {
  double total = 0.0;
  for (double v : a->data) total += v;
  auto y = make_output({}, {total}, a->requires_grad);
  if (y->requires_grad && tape.recording()) {
    Tensor* yp = y.get();
    Tensor* ap = a.get();
    tape.record(y, {a}, [yp, ap] {
      auto& g = ap->ensure_grad();
      for (auto& v : g) v += yp->grad[0];
    });
  }
  return y;
}

}  // namespace rqa
