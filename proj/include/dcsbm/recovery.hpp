#pragma once

// Parameter recovery from expected matrices.
//
//  * spectral_recover: full matrix. Eigenvector rows satisfy
//    U_i = theta_i R_{z_i} with R full rank, so communities are the classes
//    of positively proportional rows and theta ratios are row-norm ratios.
//  * offdiag_partition / offdiag_recover: diagonal deleted. Nodes are
//    grouped by proportionality of their rows outside the compared pair,
//    within-community theta ratios come from "witness" nodes, and the
//    missing diagonal is rebuilt from the recovered parameters.
//  * skeleton_diagonal / lowrank_complete: completion of the diagonal under
//    a rank-K constraint alone, without partitions or witnesses; used as an
//    independent cross-check.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "dcsbm/equivalence.hpp"
#include "dcsbm/error.hpp"
#include "dcsbm/model.hpp"
#include "dcsbm/partitions.hpp"

namespace dcsbm {

inline constexpr int kDefaultMaxIter = 500;
inline constexpr double kDefaultConvTol = 1e-10;

struct RecoveryReport {
  ParameterSystem system;  // canonical gauge
  double residual = 0.0;
  Vector diagonal;  // reconstructed diagonal of the expected matrix
  std::vector<int> witness_counts;
  std::vector<double> theta_spread;
  std::vector<std::string> flags;
};

/// Raised by offdiag_recover when the data leave some within-community theta
/// ratio or diagonal B entry undetermined. Carries the diagnostics gathered
/// up to that point.
class NonIdentifiableError : public Error {
 public:
  NonIdentifiableError(const std::string& detail, CommunityAssignment z,
                       std::vector<int> witness_counts, std::vector<int> undetermined)
      : Error(ErrorCode::kNonIdentifiable, detail),
        z_(std::move(z)),
        witness_counts_(std::move(witness_counts)),
        undetermined_(std::move(undetermined)) {}

  const CommunityAssignment& assignment() const { return z_; }
  const std::vector<int>& witness_counts() const { return witness_counts_; }
  // Nodes whose theta (or whose community's diagonal B entry) is not determined.
  const std::vector<int>& undetermined_nodes() const { return undetermined_; }

 private:
  CommunityAssignment z_;
  std::vector<int> witness_counts_;
  std::vector<int> undetermined_;
};

struct SpectralDecomposition {
  Matrix U;       // n x K, orthonormal columns
  Vector lambda;  // descending |lambda|
};

namespace detail {

inline bool is_negligible(double x, double threshold) { return std::abs(x) <= threshold; }

// Eigenpairs sorted by descending |lambda|, ties by ascending lambda; each
// eigenvector's first non-negligible coordinate is made positive.
inline SpectralDecomposition sorted_eigenpairs(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "eigendecomposition failed");
  }
  const Vector& values = solver.eigenvalues();
  const Matrix& vectors = solver.eigenvectors();
  const int n = static_cast<int>(values.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double fa = std::abs(values(a));
    const double fb = std::abs(values(b));
    if (fa != fb) return fa > fb;
    return values(a) < values(b);
  });

  SpectralDecomposition out{Matrix(n, n), Vector(n)};
  for (int c = 0; c < n; ++c) {
    out.lambda(c) = values(order[c]);
    Vector v = vectors.col(order[c]);
    const double cutoff = 1e-12 * v.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
      if (std::abs(v(i)) > cutoff) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    out.U.col(c) = v;
  }
  return out;
}

inline int numerical_rank(const Vector& sorted_lambda, double rank_tol) {
  if (sorted_lambda.size() == 0) return 0;
  const double top = std::abs(sorted_lambda(0));
  if (!(top > 0.0)) return 0;
  int r = 0;
  for (int i = 0; i < sorted_lambda.size(); ++i) {
    if (std::abs(sorted_lambda(i)) > rank_tol * top) ++r;
  }
  return r;
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline void require_square_symmetric(const ExpectedMatrix& delta) {
  if (delta.m.rows() != delta.m.cols() || delta.m.rows() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "expected matrix must be square and nonempty");
  }
  if (!is_symmetric(delta.m)) throw Error(ErrorCode::kInvalidArgument, "expected matrix not symmetric");
}

}  // namespace detail

/// Leading K eigenpairs (by magnitude) of a symmetric matrix whose numerical
/// rank must be exactly K.
inline SpectralDecomposition spectral_decompose(const Matrix& m, int K,
                                                double rank_tol = kDefaultRankTol) {
  auto full = detail::sorted_eigenpairs(m);
  const int rank = detail::numerical_rank(full.lambda, rank_tol);
  if (rank != K) {
    throw Error(ErrorCode::kRankMismatch,
                "numerical rank " + std::to_string(rank) + " != K = " + std::to_string(K));
  }
  return {full.U.leftCols(K), full.lambda.head(K)};
}

inline RecoveryReport spectral_recover(const ExpectedMatrix& delta, int K,
                                       double tol = kDefaultPartitionTol,
                                       double rank_tol = kDefaultRankTol) {
  if (delta.kind != MatrixKind::kFull) {
    throw Error(ErrorCode::kInvalidArgument, "spectral recovery needs the full expected matrix");
  }
  if (K < 1) throw Error(ErrorCode::kInvalidArgument, "K must be positive");
  detail::require_square_symmetric(delta);
  const int n = delta.n();

  const auto spectral = spectral_decompose(delta.m, K, rank_tol);
  const auto grouped = row_proportional_partition(spectral.U, tol);
  if (grouped.partition.size() != K) {
    throw Error(ErrorCode::kClusterCountMismatch,
                std::to_string(grouped.partition.size()) + " proportional row classes for K = " +
                    std::to_string(K));
  }

  RecoveryReport report;
  ParameterSystem& sys = report.system;
  sys.z = membership_from_partition(grouped.partition);
  sys.theta.resize(n);
  report.theta_spread.assign(static_cast<std::size_t>(n), 0.0);
  for (const auto& block : grouped.partition.blocks()) {
    const int anchor = block.front();
    const Eigen::RowVectorXd anchor_unit = spectral.U.row(anchor) / grouped.ratios(anchor);
    for (int i : block) {
      sys.theta(i) = i == anchor ? 1.0 : grouped.ratios(i) / grouped.ratios(anchor);
      report.theta_spread[i] =
          (spectral.U.row(i) / grouped.ratios(i) - anchor_unit).cwiseAbs().maxCoeff();
    }
  }

  // B from the mean over every (p, q) pair of delta[p][q] / (theta_p theta_q).
  sys.b = Matrix::Zero(K, K);
  Matrix counts = Matrix::Zero(K, K);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      const int k = sys.z.labels[p];
      const int l = sys.z.labels[q];
      sys.b(k, l) += delta.m(p, q) / (sys.theta(p) * sys.theta(q));
      counts(k, l) += 1.0;
    }
  }
  sys.b = sys.b.cwiseQuotient(counts);
  sys.b = (0.5 * (sys.b + sys.b.transpose())).eval();

  const Matrix rebuilt = expected_adjacency(sys).m;
  const double scale = detail::max_abs(delta.m);
  report.residual = scale > 0.0 ? detail::max_abs(rebuilt - delta.m) / scale : 0.0;
  report.diagonal = rebuilt.diagonal();
  if (!validate_system(sys, rank_tol).valid()) report.flags.emplace_back("invalid_recovered_system");
  return report;
}

/// Groups nodes i ~ j when their rows, restricted to columns outside {i, j},
/// share a zero pattern and are positively proportional on the nonzero
/// support. Entries with |x| <= tol * max|pd| count as zero.
inline Partition offdiag_partition(const ExpectedMatrix& pd, double tol = kDefaultPartitionTol) {
  detail::require_square_symmetric(pd);
  const int n = pd.n();
  if (n < 4) throw Error(ErrorCode::kTooSmall, "need at least 4 nodes, got " + std::to_string(n));
  const double zero = tol * detail::max_abs(pd.m);

  detail::DisjointSets sets(n);
  std::vector<double> a;
  std::vector<double> b;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      a.clear();
      b.clear();
      bool same_pattern = true;
      for (int m = 0; m < n && same_pattern; ++m) {
        if (m == i || m == j) continue;
        const bool za = detail::is_negligible(pd.m(i, m), zero);
        const bool zb = detail::is_negligible(pd.m(j, m), zero);
        if (za != zb) same_pattern = false;
        if (!za && !zb) {
          a.push_back(pd.m(i, m));
          b.push_back(pd.m(j, m));
        }
      }
      if (!same_pattern) continue;
      const auto norm = [](const std::vector<double>& v) {
        return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
      };
      const double na = norm(a);
      const double nb = norm(b);
      bool proportional = true;
      for (std::size_t t = 0; t < a.size() && proportional; ++t) {
        proportional = std::abs(a[t] / na - b[t] / nb) <= tol;
      }
      if (proportional) sets.unite(i, j);
    }
  }
  return sets.to_partition();
}

inline RecoveryReport offdiag_recover(const ExpectedMatrix& pd, double tol = kDefaultPartitionTol,
                                      double rank_tol = kDefaultRankTol) {
  if (pd.m.rows() == pd.m.cols() && pd.m.rows() > 0 && pd.m.diagonal().cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "diagonal-deleted matrix has a nonzero diagonal");
  }
  const Partition partition = offdiag_partition(pd, tol);
  const int n = pd.n();
  const int K = partition.size();
  const double zero = tol * detail::max_abs(pd.m);

  RecoveryReport report;
  ParameterSystem& sys = report.system;
  sys.z = membership_from_partition(partition);
  sys.theta = Vector::Ones(n);
  report.witness_counts.assign(static_cast<std::size_t>(n), 0);
  report.theta_spread.assign(static_cast<std::size_t>(n), 0.0);

  std::vector<int> undetermined;
  for (const auto& block : partition.blocks()) {
    if (block.size() == 1) {
      // theta is pinned by the gauge, but B[k][k] never appears off the diagonal.
      undetermined.push_back(block.front());
      continue;
    }
    const int anchor = block.front();
    for (std::size_t t = 1; t < block.size(); ++t) {
      const int i = block[t];
      std::vector<double> ratios;
      for (int m = 0; m < n; ++m) {
        if (m == i || m == anchor) continue;
        if (!detail::is_negligible(pd.m(anchor, m), zero)) {
          ratios.push_back(pd.m(i, m) / pd.m(anchor, m));
        }
      }
      report.witness_counts[i] = static_cast<int>(ratios.size());
      if (ratios.empty()) {
        undetermined.push_back(i);
        continue;
      }
      const double mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / ratios.size();
      double spread = 0.0;
      for (double r : ratios) spread = std::max(spread, std::abs(r - mean));
      sys.theta(i) = mean;
      report.theta_spread[i] = spread;
    }
    // The anchor's ratio to its first partner uses the same witnesses.
    report.witness_counts[anchor] = report.witness_counts[block[1]];
  }

  if (!undetermined.empty()) {
    std::sort(undetermined.begin(), undetermined.end());
    throw NonIdentifiableError(
        std::to_string(undetermined.size()) +
            " node(s) have no witness or sit in a singleton community",
        sys.z, report.witness_counts, std::move(undetermined));
  }
  for (int i = 0; i < n; ++i) {
    if (!(sys.theta(i) > 0.0)) {
      throw Error(ErrorCode::kInvalidSystem,
                  "recovered degree parameter of node " + std::to_string(i + 1) +
                      " is not positive; input is not generated by a DCSBM");
    }
  }

  // B from the mean over distinct-node pairs.
  sys.b = Matrix::Zero(K, K);
  Matrix counts = Matrix::Zero(K, K);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (p == q) continue;
      const int k = sys.z.labels[p];
      const int l = sys.z.labels[q];
      sys.b(k, l) += pd.m(p, q) / (sys.theta(p) * sys.theta(q));
      counts(k, l) += 1.0;
    }
  }
  sys.b = sys.b.cwiseQuotient(counts);
  sys.b = (0.5 * (sys.b + sys.b.transpose())).eval();

  const Matrix rebuilt = expected_adjacency(sys).m;
  report.diagonal = rebuilt.diagonal();
  const double scale = detail::max_abs(pd.m);
  const Matrix off_error = offdiag_project({rebuilt - pd.m, MatrixKind::kFull}).m;
  report.residual = scale > 0.0 ? detail::max_abs(off_error) / scale : 0.0;

  for (int i = 0; i < n; ++i) {
    if (report.theta_spread[i] > tol * (1.0 + std::abs(sys.theta(i)))) {
      report.flags.emplace_back("inconsistent_witnesses");
      break;
    }
  }
  if (!validate_system(sys, rank_tol).valid()) report.flags.emplace_back("invalid_recovered_system");
  return report;
}

enum class CompletionStart {
  kSkeleton,  // skeleton_diagonal when it succeeds, zero otherwise
  kZero,
};

struct CompletionResult {
  ExpectedMatrix matrix;  // kind Full
  int iterations = 0;
  bool converged = false;
  bool skeleton_start = false;  // whether the iteration started from skeleton_diagonal
};

/// Diagonal of a rank-K symmetric matrix from its off-diagonal entries alone.
///
/// For node i, K pivots (r, c) are chosen greedily (largest residual
/// magnitude) among pairs of distinct, not yet used nodes other than i, with
/// cross-approximation updates E -= E(:, c) E(r, :) / E(r, c). Pivots never
/// touch a diagonal entry, so every entry read is known, and rank K forces
/// the final residual at (i, i) to vanish:
///   Delta_ii = Delta_iC Delta_RC^-1 Delta_Ri.
/// Needs 2K nodes besides i and K pivots above rank_tol * max|pd|; returns
/// nullopt when some node fails. For a DCSBM whose communities all have at
/// least three members the pivots always exist.
inline std::optional<Vector> skeleton_diagonal(const ExpectedMatrix& pd, int K,
                                               double rank_tol = kDefaultRankTol) {
  detail::require_square_symmetric(pd);
  const int n = pd.n();
  if (K < 1 || n < 2 * K + 1) return std::nullopt;
  const double floor = rank_tol * detail::max_abs(pd.m);
  Vector diagonal(n);
  Matrix e;
  std::vector<char> used(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    e = pd.m;
    std::fill(used.begin(), used.end(), 0);
    used[i] = 1;
    double acc = 0.0;
    for (int step = 0; step < K; ++step) {
      int best_r = -1, best_c = -1;
      double best = floor;
      for (int c = 0; c < n; ++c) {
        if (used[c]) continue;
        for (int r = 0; r < n; ++r) {
          if (used[r] || r == c) continue;
          if (std::abs(e(r, c)) > best) {
            best = std::abs(e(r, c));
            best_r = r;
            best_c = c;
          }
        }
      }
      if (best_r < 0) return std::nullopt;
      const double pivot = e(best_r, best_c);
      const Vector col = e.col(best_c);
      const Eigen::RowVectorXd row = e.row(best_r);
      acc += col(i) * row(i) / pivot;
      e.noalias() -= col * row / pivot;
      used[best_r] = 1;
      used[best_c] = 1;
    }
    diagonal(i) = acc;
  }
  return diagonal;
}

/// Alternates between the best rank-K symmetric approximation (largest
/// |eigenvalue| truncation) and re-imposing the known off-diagonal entries.
/// Stops when the diagonal moves by at most conv_tol or after max_iter
/// rounds. A zero start can stall at a spurious fixed point when the
/// iterate's negative eigenvalues outrank the signal, hence the skeleton
/// start by default.
inline CompletionResult lowrank_complete(const ExpectedMatrix& pd, int K,
                                         int max_iter = kDefaultMaxIter,
                                         double conv_tol = kDefaultConvTol,
                                         CompletionStart start = CompletionStart::kSkeleton) {
  detail::require_square_symmetric(pd);
  if (K < 1 || K > pd.n()) throw Error(ErrorCode::kInvalidArgument, "K out of range");
  Matrix known = pd.m;
  known.diagonal().setZero();

  CompletionResult result{{known, MatrixKind::kFull}, 0, false, false};
  Matrix& x = result.matrix.m;
  if (start == CompletionStart::kSkeleton) {
    if (auto d = skeleton_diagonal({known, MatrixKind::kDiagonalDeleted}, K)) {
      x.diagonal() = *d;
      result.skeleton_start = true;
    }
  }
  while (result.iterations < max_iter) {
    const auto eig = detail::sorted_eigenpairs(x);
    const Matrix& u = eig.U;
    Vector next_diag(pd.n());
    for (int i = 0; i < pd.n(); ++i) {
      double v = 0.0;
      for (int c = 0; c < K; ++c) v += eig.lambda(c) * u(i, c) * u(i, c);
      next_diag(i) = v;
    }
    const double change = (next_diag - x.diagonal()).cwiseAbs().maxCoeff();
    x.diagonal() = next_diag;
    ++result.iterations;
    if (change <= conv_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

/// How well `candidate` serves as a rank-K completion of `pd`: the larger of
/// the worst off-diagonal mismatch and the (K+1)-th largest |eigenvalue|.
inline double completion_residual(const ExpectedMatrix& pd, const Matrix& candidate, int K) {
  Matrix off = candidate - pd.m;
  off.diagonal().setZero();
  double residual = detail::max_abs(off);
  const auto eig = detail::sorted_eigenpairs(0.5 * (candidate + candidate.transpose()));
  if (K < eig.lambda.size()) residual = std::max(residual, std::abs(eig.lambda(K)));
  return residual;
}

}  // namespace dcsbm
