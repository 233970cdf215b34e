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

#include "evpart/embed_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "evpart/vector_io.hpp"

namespace evpart {

TransferMatrix fit_transfer_matrix(const std::vector<EmbeddingPair>& pairs, double lambda) {
  if (pairs.empty()) throw Error(ErrorCode::DomainError, "no training pairs for transfer matrix");
  if (!(lambda >= 0.0)) throw Error(ErrorCode::DomainError, "lambda must be >= 0");
  const Eigen::Index db = pairs[0].base.size();
  const Eigen::Index dg = pairs[0].graph.size();
  const Eigen::Index n = static_cast<Eigen::Index>(pairs.size());

  // Stacked least squares [X^T; sqrt(lambda) I] M^T = [Y^T; 0], whose normal
  // equations are exactly M = Y X^T (X X^T + lambda I)^-1.
  const Eigen::Index extra = lambda > 0.0 ? db : 0;
  Matrix a = Matrix::Zero(n + extra, db);
  Matrix b = Matrix::Zero(n + extra, dg);
  for (Eigen::Index i = 0; i < n; ++i) {
    require_same_dim(pairs[i].base.size(), db, "transfer pair base dim");
    require_same_dim(pairs[i].graph.size(), dg, "transfer pair graph dim");
    a.row(i) = pairs[i].base.transpose();
    b.row(i) = pairs[i].graph.transpose();
  }
  if (extra > 0) a.bottomRows(extra) = std::sqrt(lambda) * Matrix::Identity(db, db);

  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() < db) {
    throw Error(ErrorCode::SingularSystem, "base vectors span rank " + std::to_string(qr.rank()) +
                                               " < " + std::to_string(db) + " with lambda = 0");
  }
  TransferMatrix m;
  m.values = qr.solve(b).transpose();
  m.lambda = lambda;
  double res = 0.0;
  for (const auto& p : pairs) res += (m.values * p.base - p.graph).squaredNorm();
  m.residual = res;
  return m;
}

Vector map_base_to_graph(const TransferMatrix& m, const Vector& base) {
  require_same_dim(m.cols(), base.size(), "map_base_to_graph");
  return m.values * base;
}

NeighborSynthesizer::NeighborSynthesizer(const GraphEmbeddingTable& graph,
                                         const BaseEmbeddingTable& base, const MappingConfig& cfg)
    : k_(cfg.k_neighbors) {
  if (k_ < 1) throw Error(ErrorCode::ConfigError, "k_neighbors must be >= 1");
  auto targets = graph.user_vectors(Domain::Target);
  for (const auto& [id, v] : targets) {
    if (base.find(id)) ids_.push_back(id);  // map iteration keeps ids sorted
  }
  if (static_cast<int>(ids_.size()) < k_) {
    throw Error(ErrorCode::InsufficientNeighbors,
                std::to_string(ids_.size()) + " target users with both embeddings, need " +
                    std::to_string(k_));
  }
  unit_graph_.resize(graph.dim(), static_cast<Eigen::Index>(ids_.size()));
  base_.resize(base.dim, static_cast<Eigen::Index>(ids_.size()));
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    const Vector& g = targets.at(ids_[i]);
    const double n = g.norm();
    unit_graph_.col(i) = n > 0.0 ? Vector(g / n) : Vector(g);
    base_.col(i) = *base.find(ids_[i]);
  }
}

std::vector<int> NeighborSynthesizer::top_k(const Vector& q) const {
  require_same_dim(q.size(), unit_graph_.rows(), "neighbor query");
  const double n = q.norm();
  Vector sims = unit_graph_.transpose() * q;
  if (n > 0.0) sims /= n;
  std::vector<int> idx(ids_.size());
  std::iota(idx.begin(), idx.end(), 0);
  // ids_ is sorted, so index order is id order.
  std::partial_sort(idx.begin(), idx.begin() + k_, idx.end(), [&](int a, int b) {
    if (sims[a] != sims[b]) return sims[a] > sims[b];
    return a < b;
  });
  idx.resize(k_);
  return idx;
}

std::vector<std::string> NeighborSynthesizer::neighbors(const Vector& q) const {
  std::vector<std::string> out;
  for (int i : top_k(q)) out.push_back(ids_[i]);
  return out;
}

Vector NeighborSynthesizer::synthesize(const Vector& q) const {
  Vector sum = Vector::Zero(base_.rows());
  for (int i : top_k(q)) sum += base_.col(i);
  return sum / static_cast<double>(k_);
}

Vector synthesize_base_embedding(const std::string& social_user_id,
                                 const GraphEmbeddingTable& graph,
                                 const BaseEmbeddingTable& base, const MappingConfig& cfg) {
  Entity e{EntityKind::User, Domain::Social, social_user_id};
  if (!graph.contains(e)) {
    throw Error(ErrorCode::MissingGraphEmbedding, "social user '" + social_user_id + "'");
  }
  return NeighborSynthesizer(graph, base, cfg).synthesize(graph.entity(e));
}

void write_transfer_matrix(const std::filesystem::path& path, const TransferMatrix& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << m.rows() << ' ' << m.cols() << ' ' << format_double(m.lambda) << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_double(m.values(i, j));
    }
    out << '\n';
  }
}

TransferMatrix read_transfer_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  Eigen::Index rows = 0, cols = 0;
  std::string lambda;
  if (!(in >> rows >> cols >> lambda) || rows <= 0 || cols <= 0) {
    throw Error(ErrorCode::ParseError, path.string() + ": bad transfer matrix header");
  }
  TransferMatrix m;
  m.lambda = std::strtod(lambda.c_str(), nullptr);
  m.values.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::string tok;
      if (!(in >> tok)) throw Error(ErrorCode::ParseError, path.string() + ": truncated matrix");
      m.values(i, j) = std::strtod(tok.c_str(), nullptr);
    }
  }
  return m;
}

}  // namespace evpart
