#pragma once

// Dense row-major tensor of 64-bit floats, rank 1..3. Rank-2 tensors are
// (rows, cols) matrices; rank-3 are (batch, time, channels) sequences.

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "tmg/core.hpp"

namespace tmg {

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    data.assign(numel_of(shape), 0.0);
  }
  Tensor(std::vector<std::size_t> s, std::vector<double> d)
      : shape(std::move(s)), data(std::move(d)) {
    if (data.size() != numel_of(shape))
      throw ConfigError("tensor: data length " + std::to_string(data.size()) +
                        " does not match shape " + shape_str(shape));
  }

  static std::size_t numel_of(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (auto d : s) n *= d;
    return s.empty() ? 0 : n;
  }

  static std::string shape_str(const std::vector<std::size_t>& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out += ",";
      out += std::to_string(s[i]);
    }
    return out + "]";
  }

  std::size_t numel() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::string shape_str() const { return shape_str(shape); }

  // rank-2 access
  double& at(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
  double at(std::size_t r, std::size_t c) const {
    return data[r * shape[1] + c];
  }
  // rank-3 access
  double& at(std::size_t b, std::size_t t, std::size_t c) {
    return data[(b * shape[1] + t) * shape[2] + c];
  }
  double at(std::size_t b, std::size_t t, std::size_t c) const {
    return data[(b * shape[1] + t) * shape[2] + c];
  }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

inline void require_same_shape(const Tensor& a, const Tensor& b,
                               const char* op) {
  if (!a.same_shape(b))
    throw ConfigError(std::string(op) + ": shape mismatch " + a.shape_str() +
                      " vs " + b.shape_str());
}

}  // namespace tmg
