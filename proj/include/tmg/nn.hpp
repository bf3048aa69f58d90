#pragma once

// Layers, initializers and the optimizer on top of the autodiff core.
// Sequences flow through layers as vectors of (batch, channels) nodes so
// recurrent cells, per-timestep heads and concat merges compose freely.

#include <cmath>
#include <string>
#include <vector>

#include "tmg/autodiff.hpp"
#include "tmg/rng.hpp"

namespace tmg {
namespace nn {

enum class Act { Linear, Relu, Tanh, Sigmoid };

inline Var activate(const Var& x, Act a) {
  switch (a) {
    case Act::Relu: return relu(x);
    case Act::Tanh: return tanh_op(x);
    case Act::Sigmoid: return sigmoid(x);
    default: return x;
  }
}

// ------------------------------------------------------------ initializers

// Uniform on ±sqrt(6/(fan_in+fan_out)), filled in row-major draw order.
inline Tensor glorot_uniform(Rng& rng, std::size_t fan_in, std::size_t fan_out,
                             std::vector<std::size_t> shape) {
  Tensor t(std::move(shape));
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.data) v = rng.uniform(-limit, limit);
  return t;
}

// Orthogonal square matrix: Householder QR of a seeded Gaussian matrix,
// columns sign-corrected so the factorization is unique (diag(R) > 0).
inline Tensor orthogonal(Rng& rng, std::size_t k) {
  Tensor a({k, k});
  for (double& v : a.data) v = rng.normal();

  Tensor q({k, k});
  for (std::size_t i = 0; i < k; ++i) q.at(i, i) = 1.0;

  std::vector<double> v(k);
  for (std::size_t j = 0; j < k; ++j) {
    double norm2 = 0.0;
    for (std::size_t i = j; i < k; ++i) norm2 += a.at(i, j) * a.at(i, j);
    double norm = std::sqrt(norm2);
    if (norm == 0.0) continue;
    const double alpha = a.at(j, j) >= 0.0 ? -norm : norm;
    v[j] = a.at(j, j) - alpha;
    for (std::size_t i = j + 1; i < k; ++i) v[i] = a.at(i, j);
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < k; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) continue;
    for (std::size_t c = j; c < k; ++c) {  // A <- H A
      double dot = 0.0;
      for (std::size_t i = j; i < k; ++i) dot += v[i] * a.at(i, c);
      const double coef = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < k; ++i) a.at(i, c) -= coef * v[i];
    }
    for (std::size_t r = 0; r < k; ++r) {  // Q <- Q H
      double dot = 0.0;
      for (std::size_t i = j; i < k; ++i) dot += q.at(r, i) * v[i];
      const double coef = 2.0 * dot / vnorm2;
      for (std::size_t i = j; i < k; ++i) q.at(r, i) -= coef * v[i];
    }
  }
  for (std::size_t i = 0; i < k; ++i)  // R = transformed A
    if (a.at(i, i) < 0.0)
      for (std::size_t r = 0; r < k; ++r) q.at(r, i) = -q.at(r, i);
  return q;
}

// Inverted dropout mask: keep with probability 1-rate, scale kept entries
// by 1/(1-rate) so the expected activation is unchanged.
inline Var dropout_mask(Rng& rng, std::size_t batch, std::size_t n,
                        double rate) {
  Tensor m({batch, n});
  const double scale = 1.0 / (1.0 - rate);
  for (double& v : m.data) v = rng.uniform() >= rate ? scale : 0.0;
  return constant(std::move(m));
}

// ----------------------------------------------------------------- layers

struct Dense {
  Parameter W;  // (n_in, n_out)
  Parameter b;  // (n_out)
  Act act = Act::Linear;

  static Dense create(const std::string& name, std::size_t n_in,
                      std::size_t n_out, Act act, Rng& rng) {
    Dense d;
    d.W = make_parameter(name + ".W",
                         glorot_uniform(rng, n_in, n_out, {n_in, n_out}));
    d.b = make_parameter(name + ".b", Tensor({n_out}));
    d.act = act;
    return d;
  }

  Var operator()(const Var& x) const {
    return activate(bias_add(matmul(x, W), b), act);
  }

  void collect(std::vector<Parameter>& out) const {
    out.push_back(W);
    out.push_back(b);
  }
};

struct Conv1D {
  Parameter W;  // (filters, kernel, ch_in)
  Parameter b;  // (filters)
  std::size_t kernel = 3;
  Act act = Act::Linear;

  static Conv1D create(const std::string& name, std::size_t ch_in,
                       std::size_t filters, std::size_t kernel, Act act,
                       Rng& rng) {
    Conv1D c;
    c.W = make_parameter(
        name + ".W", glorot_uniform(rng, ch_in * kernel, filters * kernel,
                                    {filters, kernel, ch_in}));
    c.b = make_parameter(name + ".b", Tensor({filters}));
    c.kernel = kernel;
    c.act = act;
    return c;
  }

  Var operator()(const Var& x) const {
    return activate(conv1d_op(x, W, b), act);
  }

  void collect(std::vector<Parameter>& out) const {
    out.push_back(W);
    out.push_back(b);
  }
};

// Standard LSTM cell with per-gate parameters. Input kernels are Glorot
// uniform, recurrent kernels orthogonal, biases zero except the forget
// gate's (1.0). Dropout (inverted, train only) masks the cell input with
// one mask per example held constant across timesteps.
struct LstmCell {
  std::size_t n_in = 0, units = 0;
  double dropout = 0.0;
  Parameter Wi, Wf, Wc, Wo;  // (n_in, units)
  Parameter Ui, Uf, Uc, Uo;  // (units, units)
  Parameter bi, bf, bc, bo;  // (units)

  static LstmCell create(const std::string& name, std::size_t n_in,
                         std::size_t units, double dropout, Rng& rng) {
    LstmCell l;
    l.n_in = n_in;
    l.units = units;
    l.dropout = dropout;
    auto w = [&](const char* g) {
      return make_parameter(name + ".W" + g,
                            glorot_uniform(rng, n_in, units, {n_in, units}));
    };
    l.Wi = w("i"); l.Wf = w("f"); l.Wc = w("c"); l.Wo = w("o");
    auto u = [&](const char* g) {
      return make_parameter(name + ".U" + g, orthogonal(rng, units));
    };
    l.Ui = u("i"); l.Uf = u("f"); l.Uc = u("c"); l.Uo = u("o");
    auto bias = [&](const char* g, double fill) {
      Tensor t({units});
      t.fill(fill);
      return make_parameter(name + ".b" + g, std::move(t));
    };
    l.bi = bias("i", 0.0);
    l.bf = bias("f", 1.0);
    l.bc = bias("c", 0.0);
    l.bo = bias("o", 0.0);
    return l;
  }

  // xs: per-timestep (batch, n_in) nodes; returns the h sequence.
  std::vector<Var> run(const std::vector<Var>& xs, bool training,
                       Rng& rng) const {
    if (xs.empty()) throw ConfigError("lstm: empty input sequence");
    const std::size_t batch = xs[0]->value.shape[0];
    Var mask;
    if (training && dropout > 0.0)
      mask = dropout_mask(rng, batch, n_in, dropout);

    Var h = constant(Tensor({batch, units}));
    Var c = constant(Tensor({batch, units}));
    std::vector<Var> hs;
    hs.reserve(xs.size());
    for (const Var& x_t : xs) {
      Var xm = mask ? elementwise_mul(x_t, mask) : x_t;
      Var zi = bias_add(add(matmul(xm, Wi), matmul(h, Ui)), bi);
      Var zf = bias_add(add(matmul(xm, Wf), matmul(h, Uf)), bf);
      Var zc = bias_add(add(matmul(xm, Wc), matmul(h, Uc)), bc);
      Var zo = bias_add(add(matmul(xm, Wo), matmul(h, Uo)), bo);
      Var i = sigmoid(zi);
      Var f = sigmoid(zf);
      Var g = tanh_op(zc);
      Var o = sigmoid(zo);
      c = add(elementwise_mul(f, c), elementwise_mul(i, g));
      h = elementwise_mul(o, tanh_op(c));
      hs.push_back(h);
    }
    return hs;
  }

  void collect(std::vector<Parameter>& out) const {
    for (const auto& p : {Wi, Wf, Wc, Wo, Ui, Uf, Uc, Uo, bi, bf, bc, bo})
      out.push_back(p);
  }
};

// Forward cell over the input order plus a second cell over the reversed
// order; per-timestep hidden states merged by concatenation, re-aligned so
// slot t pairs the forward state at t with the backward state that has
// consumed x_{T-1}..x_t.
struct BidirectionalLstm {
  LstmCell fwd, bwd;

  static BidirectionalLstm create(const std::string& name, std::size_t n_in,
                                  std::size_t units, double dropout,
                                  Rng& rng) {
    BidirectionalLstm b;
    b.fwd = LstmCell::create(name + ".fwd", n_in, units, dropout, rng);
    b.bwd = LstmCell::create(name + ".bwd", n_in, units, dropout, rng);
    return b;
  }

  std::vector<Var> run(const std::vector<Var>& xs, bool training,
                       Rng& rng) const {
    auto hf = fwd.run(xs, training, rng);
    std::vector<Var> rev(xs.rbegin(), xs.rend());
    auto hb = bwd.run(rev, training, rng);
    std::vector<Var> out;
    out.reserve(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t)
      out.push_back(concat(hf[t], hb[xs.size() - 1 - t], 1));
    return out;
  }

  void collect(std::vector<Parameter>& out) const {
    fwd.collect(out);
    bwd.collect(out);
  }
};

// -------------------------------------------------------------- optimizer

struct AdamState {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  long timestep = 0;
  std::vector<Tensor> m, v;  // aligned with the parameter list

  void init(const std::vector<Parameter>& params) {
    timestep = 0;
    m.clear();
    v.clear();
    for (const auto& p : params) {
      m.emplace_back(p->value.shape);
      v.emplace_back(p->value.shape);
    }
  }
};

// Bias-corrected Adam update; zeroes gradients afterwards so the next
// backward pass starts clean.
inline void adam_step(std::vector<Parameter>& params, AdamState& st) {
  if (st.m.size() != params.size()) st.init(params);
  st.timestep += 1;
  const double b1t = 1.0 - std::pow(st.beta1, static_cast<double>(st.timestep));
  const double b2t = 1.0 - std::pow(st.beta2, static_cast<double>(st.timestep));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Node& p = *params[i];
    p.ensure_grad();
    for (std::size_t j = 0; j < p.value.data.size(); ++j) {
      const double g = p.grad.data[j];
      double& mj = st.m[i].data[j];
      double& vj = st.v[i].data[j];
      mj = st.beta1 * mj + (1.0 - st.beta1) * g;
      vj = st.beta2 * vj + (1.0 - st.beta2) * g * g;
      const double mhat = mj / b1t;
      const double vhat = vj / b2t;
      p.value.data[j] -= st.learning_rate * mhat / (std::sqrt(vhat) + st.epsilon);
    }
    p.grad.fill(0.0);
  }
}

inline void zero_grads(const std::vector<Parameter>& params) {
  for (const auto& p : params) {
    p->ensure_grad();
    p->grad.fill(0.0);
  }
}

}  // namespace nn
}  // namespace tmg
