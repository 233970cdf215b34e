// Copyright 2026 The evpart Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <limits>
#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "evpart/types.hpp"

namespace evpart {

// Affine layer y = W x + b applied column-wise to a batch (one sample per column).
struct Dense {
  Matrix W;  // out x in
  Matrix b;  // out x 1

  Dense() = default;
  Dense(int in, int out) : W(Matrix::Zero(out, in)), b(Matrix::Zero(out, 1)) {}

  int in() const { return static_cast<int>(W.cols()); }
  int out() const { return static_cast<int>(W.rows()); }

  Matrix forward(const Matrix& x) const {
    require_same_dim(x.rows(), W.cols(), "Dense input");
    return (W * x).colwise() + b.col(0);
  }

  // Accumulates parameter gradients into grad; returns dL/dx.
  Matrix backward(const Matrix& x, const Matrix& dy, Dense& grad) const {
    grad.W.noalias() += dy * x.transpose();
    grad.b.col(0) += dy.rowwise().sum();
    return W.transpose() * dy;
  }

  // Same as backward but skips the input gradient.
  void backward_params(const Matrix& x, const Matrix& dy, Dense& grad) const {
    grad.W.noalias() += dy * x.transpose();
    grad.b.col(0) += dy.rowwise().sum();
  }

  static Dense identity(int n) {
    Dense d(n, n);
    d.W.setIdentity();
    return d;
  }
};

// Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero bias.
void glorot_init(Dense& d, Rng& rng);
void glorot_init(Matrix& m, Rng& rng);

using TensorList = std::vector<std::pair<std::string, Matrix*>>;
using ConstTensorList = std::vector<std::pair<std::string, const Matrix*>>;

void append_dense(TensorList& out, const std::string& name, Dense& d);

// Parameter structs expose their tensors in a fixed order; these helpers act
// on any such struct.
template <class P>
P zeros_like(const P& p) {
  P g = p;
  for (auto& [name, m] : g.tensors()) m->setZero();
  return g;
}

template <class P>
void sgd_step(P& params, P& grad, double lr) {
  auto ps = params.tensors();
  auto gs = grad.tensors();
  for (std::size_t i = 0; i < ps.size(); ++i) *ps[i].second -= lr * *gs[i].second;
}

template <class P>
bool tensors_equal(P& a, P& b) {
  auto as = a.tensors();
  auto bs = b.tensors();
  if (as.size() != bs.size()) return false;
  for (std::size_t i = 0; i < as.size(); ++i) {
    if (as[i].second->rows() != bs[i].second->rows() ||
        as[i].second->cols() != bs[i].second->cols() || *as[i].second != *bs[i].second) {
      return false;
    }
  }
  return true;
}

// Clamped so the result stays strictly inside (0, 1) in double precision.
inline double sigmoid(double x) {
  const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  return std::clamp(s, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

// Tensor section of a checkpoint: "tensor <name> <rows> <cols>" followed by
// row-major values in shortest round-trip form.
void write_tensors(std::ostream& out, const TensorList& tensors);
void read_tensors(std::istream& in, const TensorList& tensors);

}  // namespace evpart
