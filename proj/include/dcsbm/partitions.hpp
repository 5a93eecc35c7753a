#pragma once

// Partitions of node indices induced by row equivalence and row proportional
// equivalence, and the label permutation between two membership vectors.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "dcsbm/error.hpp"
#include "dcsbm/model.hpp"

namespace dcsbm {

inline constexpr double kDefaultPartitionTol = 1e-9;

// Disjoint blocks covering 0..n-1. Always held in canonical order: each block
// ascending, blocks ordered by their minimum element.
class Partition {
 public:
  Partition() = default;

  Partition(int n, std::vector<std::vector<int>> blocks) : n_(n), blocks_(std::move(blocks)) {
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (auto& block : blocks_) {
      if (block.empty()) throw Error(ErrorCode::kInvalidArgument, "partition has an empty block");
      std::sort(block.begin(), block.end());
      for (int i : block) {
        if (i < 0 || i >= n) throw Error(ErrorCode::kInvalidArgument, "partition index out of range");
        if (seen[static_cast<std::size_t>(i)]++) {
          throw Error(ErrorCode::kInvalidArgument, "partition blocks overlap");
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      throw Error(ErrorCode::kInvalidArgument, "partition does not cover every node");
    }
    std::sort(blocks_.begin(), blocks_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
  }

  int n() const { return n_; }
  int size() const { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  int n_ = 0;
  std::vector<std::vector<int>> blocks_;
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller root wins, so results do not depend on union order.
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

  Partition to_partition() {
    const int n = static_cast<int>(parent_.size());
    std::vector<std::vector<int>> by_root(parent_.size());
    for (int i = 0; i < n; ++i) by_root[find(i)].push_back(i);
    std::vector<std::vector<int>> blocks;
    for (auto& block : by_root) {
      if (!block.empty()) blocks.push_back(std::move(block));
    }
    return Partition(n, std::move(blocks));
  }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

inline Partition partition_of(const CommunityAssignment& z) {
  std::vector<std::vector<int>> blocks(static_cast<std::size_t>(z.K));
  for (int i = 0; i < z.n(); ++i) blocks[z.labels[i]].push_back(i);
  std::erase_if(blocks, [](const auto& b) { return b.empty(); });
  return Partition(z.n(), std::move(blocks));
}

/// Rows i and j are merged when max_k |M(i,k) - M(j,k)| <= tol * (1 + m),
/// m being the larger of the two rows' max-abs entries. Merging is closed
/// transitively.
inline Partition row_equivalence_partition(const Matrix& m, double tol = kDefaultPartitionTol) {
  const int n = static_cast<int>(m.rows());
  detail::DisjointSets sets(n);
  Vector row_max(n);
  for (int i = 0; i < n; ++i) row_max(i) = m.cols() ? m.row(i).cwiseAbs().maxCoeff() : 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double diff = m.cols() ? (m.row(i) - m.row(j)).cwiseAbs().maxCoeff() : 0.0;
      if (diff <= tol * (1.0 + std::max(row_max(i), row_max(j)))) sets.unite(i, j);
    }
  }
  return sets.to_partition();
}

struct ProportionalPartition {
  Partition partition;
  // Euclidean norm of every row; within a block ratios[i] / ratios[j] is the
  // positive proportionality factor between rows i and j.
  Vector ratios;
};

/// Groups rows that are positive multiples of each other: each row is divided
/// by its max-abs entry and the results are compared entrywise within tol.
/// Max-abs scaling keeps tol = 0 exact on integer-valued rows (both sides of
/// a comparison are correctly rounded quotients of the same rational).
inline ProportionalPartition row_proportional_partition(const Matrix& m,
                                                        double tol = kDefaultPartitionTol) {
  const int n = static_cast<int>(m.rows());
  Vector norms = m.rowwise().norm();
  for (int i = 0; i < n; ++i) {
    if (!(norms(i) > tol)) {
      throw Error(ErrorCode::kZeroRow, "row " + std::to_string(i + 1) + " has norm <= tol");
    }
  }
  Matrix unit(m.rows(), m.cols());
  for (int i = 0; i < n; ++i) unit.row(i) = m.row(i) / m.row(i).cwiseAbs().maxCoeff();
  detail::DisjointSets sets(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if ((unit.row(i) - unit.row(j)).cwiseAbs().maxCoeff() <= tol) sets.unite(i, j);
    }
  }
  return {sets.to_partition(), std::move(norms)};
}

/// perm with z2[i] == perm[z1[i]] for every node, when the two assignments
/// induce the same partition.
inline std::optional<std::vector<int>> permutation_between(const CommunityAssignment& z1,
                                                           const CommunityAssignment& z2) {
  if (z1.n() != z2.n() || z1.K != z2.K) return std::nullopt;
  std::vector<int> forward(static_cast<std::size_t>(z1.K), -1);
  std::vector<int> backward(static_cast<std::size_t>(z2.K), -1);
  for (int i = 0; i < z1.n(); ++i) {
    const int a = z1.labels[i];
    const int b = z2.labels[i];
    if (forward[a] == -1 && backward[b] == -1) {
      forward[a] = b;
      backward[b] = a;
    } else if (forward[a] != b || backward[b] != a) {
      return std::nullopt;
    }
  }
  if (std::find(forward.begin(), forward.end(), -1) != forward.end()) return std::nullopt;
  return forward;
}

/// Canonical labeling: community k is the k-th block in canonical order, so
/// the block containing node 0 is community 0.
inline CommunityAssignment membership_from_partition(const Partition& p) {
  CommunityAssignment z;
  z.K = p.size();
  z.labels.assign(static_cast<std::size_t>(p.n()), 0);
  for (int k = 0; k < p.size(); ++k) {
    for (int i : p.blocks()[k]) z.labels[i] = k;
  }
  return z;
}

}  // namespace dcsbm
