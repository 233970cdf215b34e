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

#include "evpart/dense.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "evpart/vector_io.hpp"

namespace evpart {

void glorot_init(Matrix& m, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
}

void glorot_init(Dense& d, Rng& rng) {
  glorot_init(d.W, rng);
  d.b.setZero();
}

void append_dense(TensorList& out, const std::string& name, Dense& d) {
  out.emplace_back(name + ".W", &d.W);
  out.emplace_back(name + ".b", &d.b);
}

void write_tensors(std::ostream& out, const TensorList& tensors) {
  for (const auto& [name, m] : tensors) {
    out << "tensor " << name << ' ' << m->rows() << ' ' << m->cols() << '\n';
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      for (Eigen::Index j = 0; j < m->cols(); ++j) {
        if (j) out << ' ';
        out << format_double((*m)(i, j));
      }
      out << '\n';
    }
  }
}

void read_tensors(std::istream& in, const TensorList& tensors) {
  for (const auto& [name, m] : tensors) {
    std::string tag, got;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> tag >> got >> rows >> cols) || tag != "tensor") {
      throw Error(ErrorCode::ParseError, "checkpoint: expected tensor header for " + name);
    }
    if (got != name || rows != m->rows() || cols != m->cols()) {
      throw Error(ErrorCode::ParseError, "checkpoint: tensor " + got + " (" +
                                             std::to_string(rows) + "x" + std::to_string(cols) +
                                             ") does not match " + name);
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        std::string tok;
        if (!(in >> tok)) throw Error(ErrorCode::ParseError, "checkpoint: truncated " + name);
        char* end = nullptr;
        (*m)(i, j) = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) {
          throw Error(ErrorCode::ParseError, "checkpoint: bad value in " + name);
        }
      }
    }
  }
}

}  // namespace evpart
