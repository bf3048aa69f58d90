#pragma once

// Reverse-mode automatic differentiation over a dynamically built DAG.
// Each op allocates a Node holding its value, a lazily used gradient
// buffer, the input edges, and a closure that pushes the node's gradient
// into its inputs. backward() topologically sorts the graph reachable from
// the loss and runs the closures in reverse order.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tmg/tensor.hpp"

namespace tmg {
namespace nn {

struct Node {
  Tensor value;
  Tensor grad;  // same shape as value once backward touches the node
  bool requires_grad = false;
  std::string name;  // set on parameters, empty on interior nodes
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void()> backward_fn;  // captures what it needs

  void ensure_grad() {
    if (grad.shape != value.shape) {
      grad = Tensor(value.shape);
    }
  }
  void zero_grad() {
    grad = Tensor(value.shape);
  }
};

using Var = std::shared_ptr<Node>;
// A Parameter is a named leaf Var whose gradient Adam consumes.
using Parameter = std::shared_ptr<Node>;

inline Var constant(Tensor v) {
  auto n = std::make_shared<Node>();
  n->value = std::move(v);
  return n;
}

inline Parameter make_parameter(std::string name, Tensor v) {
  auto n = std::make_shared<Node>();
  n->value = std::move(v);
  n->requires_grad = true;
  n->name = std::move(name);
  n->ensure_grad();
  return n;
}

namespace detail {

inline Var make_op(Tensor value, std::vector<Var> inputs,
                   std::function<void()> backward) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->inputs = std::move(inputs);
  for (const auto& in : n->inputs)
    if (in->requires_grad) n->requires_grad = true;
  if (n->requires_grad) n->backward_fn = std::move(backward);
  return n;
}

inline void require_rank(const Var& x, std::size_t r, const char* op) {
  if (x->value.rank() != r)
    throw ConfigError(std::string(op) + ": expected rank " + std::to_string(r) +
                      " tensor, got shape " + x->value.shape_str());
}

}  // namespace detail

// ------------------------------------------------------------- primitives

// (m,k)·(k,n) -> (m,n)
inline Var matmul(const Var& a, const Var& b) {
  detail::require_rank(a, 2, "matmul");
  detail::require_rank(b, 2, "matmul");
  const std::size_t m = a->value.shape[0], k = a->value.shape[1];
  if (b->value.shape[0] != k)
    throw ConfigError("matmul: shape mismatch " + a->value.shape_str() +
                      " vs " + b->value.shape_str());
  const std::size_t n = b->value.shape[1];
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a->value.at(i, p);
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j)
        out.at(i, j) += av * b->value.at(p, j);
    }
  auto node = detail::make_op(std::move(out), {a, b}, nullptr);
  std::weak_ptr<Node> wn = node;
  node->backward_fn = [wn, a, b, m, k, n]() {
    auto self = wn.lock();
    const Tensor& g = self->grad;
    if (a->requires_grad) {
      a->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double gv = g.at(i, j);
          if (gv == 0.0) continue;
          for (std::size_t p = 0; p < k; ++p)
            a->grad.at(i, p) += gv * b->value.at(p, j);
        }
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double av = a->value.at(i, p);
          if (av == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j)
            b->grad.at(p, j) += av * g.at(i, j);
        }
    }
  };
  return node;
}

// (m,n) + (n) broadcast over rows
inline Var bias_add(const Var& x, const Var& b) {
  detail::require_rank(x, 2, "bias_add");
  detail::require_rank(b, 1, "bias_add");
  const std::size_t m = x->value.shape[0], n = x->value.shape[1];
  if (b->value.shape[0] != n)
    throw ConfigError("bias_add: shape mismatch " + x->value.shape_str() +
                      " vs " + b->value.shape_str());
  Tensor out = x->value;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) += b->value.data[j];
  auto node = detail::make_op(std::move(out), {x, b}, nullptr);
  std::weak_ptr<Node> wn = node;
  node->backward_fn = [wn, x, b, m, n]() {
    auto self = wn.lock();
    const Tensor& g = self->grad;
    if (x->requires_grad) {
      x->ensure_grad();
      for (std::size_t i = 0; i < g.data.size(); ++i)
        x->grad.data[i] += g.data[i];
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) b->grad.data[j] += g.at(i, j);
    }
  };
  return node;
}

inline Var add(const Var& a, const Var& b) {
  require_same_shape(a->value, b->value, "add");
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] += b->value.data[i];
  auto node = detail::make_op(std::move(out), {a, b}, nullptr);
  std::weak_ptr<Node> wn = node;
  node->backward_fn = [wn, a, b]() {
    auto self = wn.lock();
    const Tensor& g = self->grad;
    for (const Var& in : {a, b}) {
      if (!in->requires_grad) continue;
      in->ensure_grad();
      for (std::size_t i = 0; i < g.data.size(); ++i)
        in->grad.data[i] += g.data[i];
    }
  };
  return node;
}

inline Var elementwise_mul(const Var& a, const Var& b) {
  require_same_shape(a->value, b->value, "elementwise_mul");
  Tensor out = a->value;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] *= b->value.data[i];
  auto node = detail::make_op(std::move(out), {a, b}, nullptr);
  std::weak_ptr<Node> wn = node;
  node->backward_fn = [wn, a, b]() {
    auto self = wn.lock();
    const Tensor& g = self->grad;
    if (a->requires_grad) {
      a->ensure_grad();
      for (std::size_t i = 0; i < g.data.size(); ++i)
        a->grad.data[i] += g.data[i] * b->value.data[i];
    }
    if (b->requires_grad) {
      b->ensure_grad();
      for (std::size_t i = 0; i < g.data.size(); ++i)
        b->grad.data[i] += g.data[i] * a->value.data[i];
    }
  };
  return node;
}

namespace detail {

template <typename Fwd, typename Dydx>
Var unary_op(const Var& x, Fwd fwd, Dydx dydx_from_y) {
  Tensor out = x->value;
  for (double& v : out.data) v = fwd(v);
  auto node = make_op(std::move(out), {x}, nullptr);
  std::weak_ptr<Node> wn = node;
  node->backward_fn = [wn, x, dydx_from_y]() {
    auto self = wn.lock();
    if (!x->requires_grad) return;
    x->ensure_grad();
    for (std::size_t i = 0; i < self->grad.data.size(); ++i)
      x->grad.data[i] += self->grad.data[i] *
                         dydx_from_y(self->value.data[i], x->value.data[i]);
  };
  return node;
}

}  // namespace detail

inline Var relu(const Var& x) {
  return detail::unary_op(
      x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double, double xi) { return xi > 0.0 ? 1.0 : 0.0; });
}

inline Var tanh_op(const Var& x) {
  return detail::unary_op(
      x, [](double v) { return std::tanh(v); },
      [](double y, double) { return 1.0 - y * y; });
}

inline Var sigmoid(const Var& x) {
  return detail::unary_op(
      x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double y, double) { return y * (1.0 - y); });
}

// concat of two rank-2 tensors along axis 0 (rows) or 1 (columns)
inline Var concat(const Var& a, const Var& b, int axis) {
  detail::require_rank(a, 2, "concat");
  detail::require_rank(b, 2, "concat");
  if (axis != 0 && axis != 1) throw ConfigError("concat: axis must be 0 or 1");
  const std::size_t keep = axis == 0 ? 1 : 0;
  if (a->value.shape[keep] != b->value.shape[keep])
    throw ConfigError("concat: shape mismatch " + a->value.shape_str() +
                      " vs " + b->value.shape_str());
  Tensor out;
  if (axis == 0) {
    out = Tensor({a->value.shape[0] + b->value.shape[0], a->value.shape[1]});
    std::copy(a->value.data.begin(), a->value.data.end(), out.data.begin());
    std::copy(b->value.data.begin(), b->value.data.end(),
              out.data.begin() + static_cast<long>(a->value.data.size()));
  } else {
    const std::size_t m = a->value.shape[0];
    const std::size_t na = a->value.shape[1], nb = b->value.shape[1];
    out = Tensor({m, na + nb});
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < na; ++j) out.at(i, j) = a->value.at(i, j);
      for (std::size_t j = 0; j < nb; ++j)
        out.at(i, na + j) = b->value.at(i, j);
    }
  }
  auto node = detail::make_op(std::move(out), {a, b}, nullptr);
  std::weak_ptr<Node> wn = node;
  node->backward_fn = [wn, a, b, axis]() {
    auto self = wn.lock();
    const Tensor& g = self->grad;
    if (axis == 0) {
      if (a->requires_grad) {
        a->ensure_grad();
        for (std::size_t i = 0; i < a->grad.data.size(); ++i)
          a->grad.data[i] += g.data[i];
      }
      if (b->requires_grad) {
        b->ensure_grad();
        const std::size_t off = a->value.data.size();
        for (std::size_t i = 0; i < b->grad.data.size(); ++i)
          b->grad.data[i] += g.data[off + i];
      }
    } else {
      const std::size_t m = a->value.shape[0];
      const std::size_t na = a->value.shape[1], nb = b->value.shape[1];
      if (a->requires_grad) {
        a->ensure_grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < na; ++j)
            a->grad.at(i, j) += g.at(i, j);
      }
      if (b->requires_grad) {
        b->ensure_grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < nb; ++j)
            b->grad.at(i, j) += g.at(i, na + j);
      }
    }
  };
  return node;
}

// column sub-range of a rank-2 tensor
inline Var slice_cols(const Var& x, std::size_t off, std::size_t len) {
  detail::require_rank(x, 2, "slice_cols");
  const std::size_t m = x->value.shape[0], n = x->value.shape[1];
  if (off + len > n)
    throw ConfigError("slice_cols: range [" + std::to_string(off) + "," +
                      std::to_string(off + len) + ") exceeds " +
                      x->value.shape_str());
  Tensor out({m, len});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < len; ++j) out.at(i, j) = x->value.at(i, off + j);
  auto node = detail::make_op(std::move(out), {x}, nullptr);
  std::weak_ptr<Node> wn = node;
  node->backward_fn = [wn, x, m, len, off]() {
    auto self = wn.lock();
    if (!x->requires_grad) return;
    x->ensure_grad();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < len; ++j)
        x->grad.at(i, off + j) += self->grad.at(i, j);
  };
  return node;
}

// timestep t of a (batch, time, ch) tensor -> (batch, ch)
inline Var slice_time(const Var& x, std::size_t t) {
  detail::require_rank(x, 3, "slice_time");
  const std::size_t B = x->value.shape[0], T = x->value.shape[1],
                    C = x->value.shape[2];
  if (t >= T)
    throw ConfigError("slice_time: index " + std::to_string(t) + " exceeds " +
                      x->value.shape_str());
  Tensor out({B, C});
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t c = 0; c < C; ++c) out.at(b, c) = x->value.at(b, t, c);
  auto node = detail::make_op(std::move(out), {x}, nullptr);
  std::weak_ptr<Node> wn = node;
  node->backward_fn = [wn, x, B, C, t]() {
    auto self = wn.lock();
    if (!x->requires_grad) return;
    x->ensure_grad();
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t c = 0; c < C; ++c)
        x->grad.at(b, t, c) += self->grad.at(b, c);
  };
  return node;
}

// (batch, time, ch) -> (batch, time*ch); row-major layout is unchanged
inline Var flatten(const Var& x) {
  detail::require_rank(x, 3, "flatten");
  Tensor out({x->value.shape[0], x->value.shape[1] * x->value.shape[2]});
  out.data = x->value.data;
  auto node = detail::make_op(std::move(out), {x}, nullptr);
  std::weak_ptr<Node> wn = node;
  node->backward_fn = [wn, x]() {
    auto self = wn.lock();
    if (!x->requires_grad) return;
    x->ensure_grad();
    for (std::size_t i = 0; i < self->grad.data.size(); ++i)
      x->grad.data[i] += self->grad.data[i];
  };
  return node;
}

// valid cross-correlation: x (batch, time, ch_in) * w (filters, kernel,
// ch_in) + b (filters) -> (batch, time-kernel+1, filters)
inline Var conv1d_op(const Var& x, const Var& w, const Var& b) {
  detail::require_rank(x, 3, "conv1d");
  detail::require_rank(w, 3, "conv1d");
  detail::require_rank(b, 1, "conv1d");
  const std::size_t B = x->value.shape[0], T = x->value.shape[1],
                    C = x->value.shape[2];
  const std::size_t F = w->value.shape[0], K = w->value.shape[1];
  if (w->value.shape[2] != C)
    throw ConfigError("conv1d: shape mismatch " + x->value.shape_str() +
                      " vs kernel " + w->value.shape_str());
  if (b->value.shape[0] != F)
    throw ConfigError("conv1d: bias shape " + b->value.shape_str() +
                      " does not match filters " + std::to_string(F));
  if (K > T)
    throw ConfigError("conv1d: kernel size " + std::to_string(K) +
                      " exceeds input length " + std::to_string(T));
  const std::size_t To = T - K + 1;
  Tensor out({B, To, F});
  for (std::size_t bt = 0; bt < B; ++bt)
    for (std::size_t t = 0; t < To; ++t)
      for (std::size_t f = 0; f < F; ++f) {
        double s = b->value.data[f];
        for (std::size_t k = 0; k < K; ++k)
          for (std::size_t c = 0; c < C; ++c)
            s += x->value.at(bt, t + k, c) * w->value.at(f, k, c);
        out.at(bt, t, f) = s;
      }
  auto node = detail::make_op(std::move(out), {x, w, b}, nullptr);
  std::weak_ptr<Node> wn = node;
  node->backward_fn = [wn, x, w, b, B, To, F, K, C]() {
    auto self = wn.lock();
    const Tensor& g = self->grad;
    if (x->requires_grad) x->ensure_grad();
    if (w->requires_grad) w->ensure_grad();
    if (b->requires_grad) b->ensure_grad();
    for (std::size_t bt = 0; bt < B; ++bt)
      for (std::size_t t = 0; t < To; ++t)
        for (std::size_t f = 0; f < F; ++f) {
          const double gv = g.at(bt, t, f);
          if (gv == 0.0) continue;
          if (b->requires_grad) b->grad.data[f] += gv;
          for (std::size_t k = 0; k < K; ++k)
            for (std::size_t c = 0; c < C; ++c) {
              if (w->requires_grad)
                w->grad.at(f, k, c) += gv * x->value.at(bt, t + k, c);
              if (x->requires_grad)
                x->grad.at(bt, t + k, c) += gv * w->value.at(f, k, c);
            }
        }
  };
  return node;
}

// non-overlapping max pooling over time; gradient routes to the first
// maximal position of each window
inline Var maxpool1d_op(const Var& x, std::size_t pool) {
  detail::require_rank(x, 3, "maxpool1d");
  if (pool < 1) throw ConfigError("maxpool1d: pool must be >= 1");
  const std::size_t B = x->value.shape[0], T = x->value.shape[1],
                    C = x->value.shape[2];
  if (T < pool)
    throw ConfigError("maxpool1d: pool size " + std::to_string(pool) +
                      " exceeds input length " + std::to_string(T));
  const std::size_t To = T / pool;
  Tensor out({B, To, C});
  auto argmax = std::make_shared<std::vector<std::size_t>>(B * To * C);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < To; ++t)
      for (std::size_t c = 0; c < C; ++c) {
        std::size_t best = t * pool;
        double bv = x->value.at(b, best, c);
        for (std::size_t k = 1; k < pool; ++k) {
          double v = x->value.at(b, t * pool + k, c);
          if (v > bv) {
            bv = v;
            best = t * pool + k;
          }
        }
        out.at(b, t, c) = bv;
        (*argmax)[(b * To + t) * C + c] = best;
      }
  auto node = detail::make_op(std::move(out), {x}, nullptr);
  std::weak_ptr<Node> wn = node;
  node->backward_fn = [wn, x, argmax, B, To, C]() {
    auto self = wn.lock();
    if (!x->requires_grad) return;
    x->ensure_grad();
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t t = 0; t < To; ++t)
        for (std::size_t c = 0; c < C; ++c)
          x->grad.at(b, (*argmax)[(b * To + t) * C + c], c) +=
              self->grad.at(b, t, c);
  };
  return node;
}

// mean of squared element differences -> scalar (1,1) node
inline Var mse_loss(const Var& pred, const Var& truth) {
  require_same_shape(pred->value, truth->value, "mse_loss");
  const std::size_t n = pred->value.data.size();
  if (n == 0) throw ConfigError("mse_loss: empty tensors");
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pred->value.data[i] - truth->value.data[i];
    s += d * d;
  }
  Tensor out({1, 1});
  out.data[0] = s / static_cast<double>(n);
  auto node = detail::make_op(std::move(out), {pred, truth}, nullptr);
  std::weak_ptr<Node> wn = node;
  node->backward_fn = [wn, pred, truth, n]() {
    auto self = wn.lock();
    const double g = self->grad.data[0] * 2.0 / static_cast<double>(n);
    if (pred->requires_grad) {
      pred->ensure_grad();
      for (std::size_t i = 0; i < n; ++i)
        pred->grad.data[i] +=
            g * (pred->value.data[i] - truth->value.data[i]);
    }
    if (truth->requires_grad) {
      truth->ensure_grad();
      for (std::size_t i = 0; i < n; ++i)
        truth->grad.data[i] -=
            g * (pred->value.data[i] - truth->value.data[i]);
    }
  };
  return node;
}

// --------------------------------------------------------------- backward

// Accumulates d(root)/d(leaf) into every reachable Parameter's grad.
// Interior gradients are freshly zeroed per call; parameter grads are NOT
// cleared here (zeroing between optimizer steps is adam_step's job).
inline void backward(const Var& root) {
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack;
  stack.emplace_back(root.get(), 0);
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->inputs.size()) {
      Node* in = node->inputs[idx++].get();
      if (in->requires_grad && !seen.count(in)) {
        seen.insert(in);
        stack.emplace_back(in, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  // order is a post-order: inputs precede consumers. Zero interior grads,
  // seed the root, then run consumers before producers.
  for (Node* n : order)
    if (n->backward_fn) n->zero_grad();
  root->ensure_grad();
  if (root.get()->backward_fn || root->requires_grad) {
    root->grad.fill(1.0);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backward_fn) (*it)->backward_fn();
}

}  // namespace nn
}  // namespace tmg
