#pragma once

// Core DCSBM types: parameter systems (Z, Theta, B), expected matrices and
// the structural checks the identifiability results depend on.
//
// Indices are 0-based throughout the C++ API. External formats (JSON, CSV,
// CLI) are 1-based and converted at the io layer.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "dcsbm/error.hpp"

namespace dcsbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultRankTol = 1e-10;

// Node -> community map. labels[i] in [0, K).
struct CommunityAssignment {
  int K = 0;
  std::vector<int> labels;

  int n() const { return static_cast<int>(labels.size()); }

  // Binary n x K membership matrix Z.
  Matrix membership_matrix() const {
    Matrix z = Matrix::Zero(n(), K);
    for (int i = 0; i < n(); ++i) z(i, labels[i]) = 1.0;
    return z;
  }

  friend bool operator==(const CommunityAssignment&, const CommunityAssignment&) = default;
};

struct ParameterSystem {
  CommunityAssignment z;
  Vector theta;
  Matrix b;

  int n() const { return z.n(); }
  int K() const { return z.K; }
};

enum class MatrixKind { kFull, kDiagonalDeleted };

struct ExpectedMatrix {
  Matrix m;
  MatrixKind kind = MatrixKind::kFull;

  int n() const { return static_cast<int>(m.rows()); }
};

struct ValidationReport {
  std::vector<std::string> violations;

  bool valid() const { return violations.empty(); }
};

/// Result of remapping an arbitrary label alphabet onto 0..K-1.
/// `original[k]` is the input label that became community k; communities are
/// numbered in ascending order of the original label values.
struct LabelMapping {
  CommunityAssignment z;
  std::vector<long long> original;
};

inline LabelMapping remap_labels(const std::vector<long long>& raw) {
  std::map<long long, int> index;
  for (long long label : raw) index.emplace(label, 0);
  LabelMapping out;
  for (auto& [label, k] : index) {
    k = static_cast<int>(out.original.size());
    out.original.push_back(label);
  }
  out.z.K = static_cast<int>(out.original.size());
  out.z.labels.reserve(raw.size());
  for (long long label : raw) out.z.labels.push_back(index.at(label));
  return out;
}

inline std::vector<int> community_sizes(const CommunityAssignment& z) {
  std::vector<int> sizes(static_cast<std::size_t>(z.K), 0);
  for (int label : z.labels) ++sizes[static_cast<std::size_t>(label)];
  return sizes;
}

// threshold = 3 is the full-identifiability size condition, threshold = 2
// the partition-identifiability one.
inline bool check_min_size(const CommunityAssignment& z, int threshold) {
  const auto sizes = community_sizes(z);
  return std::all_of(sizes.begin(), sizes.end(), [&](int s) { return s >= threshold; });
}

/// Ratio of smallest to largest singular value; 0 for an empty or zero matrix.
inline double relative_min_singular_value(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  const double largest = s(0);
  if (!(largest > 0.0)) return 0.0;
  return s(s.size() - 1) / largest;
}

inline ValidationReport validate_system(const ParameterSystem& sys,
                                        double rank_tol = kDefaultRankTol) {
  ValidationReport report;
  auto fail = [&](std::string reason) { report.violations.push_back(std::move(reason)); };

  const int n = sys.n();
  const int K = sys.K();
  if (n < 1) fail("node count must be positive");
  if (K < 1) fail("community count must be positive");
  if (K > n) fail("community count exceeds node count");
  if (sys.theta.size() != n) fail("theta length does not match node count");
  if (sys.b.rows() != K || sys.b.cols() != K) fail("B must be K x K");
  if (!report.valid()) return report;

  bool labels_in_range = true;
  for (int label : sys.z.labels) {
    if (label < 0 || label >= K) labels_in_range = false;
  }
  if (!labels_in_range) {
    fail("community label out of range");
  } else if (!check_min_size(sys.z, 1)) {
    fail("every community must have at least one member");
  }

  for (int i = 0; i < n; ++i) {
    if (!(sys.theta(i) > 0.0) || !std::isfinite(sys.theta(i))) {
      fail("degree parameter must be positive");
      break;
    }
  }

  if (!sys.b.allFinite()) {
    fail("B has non-finite entries");
    return report;
  }
  if (sys.b != sys.b.transpose()) fail("B not symmetric");
  if (!(relative_min_singular_value(sys.b) > rank_tol)) fail("B rank deficient");
  return report;
}

inline void require_valid(const ParameterSystem& sys, double rank_tol = kDefaultRankTol) {
  const auto report = validate_system(sys, rank_tol);
  if (!report.valid()) throw Error(ErrorCode::kInvalidSystem, report.violations.front());
}

namespace detail {

inline void require_dimensions(const ParameterSystem& sys) {
  if (sys.theta.size() != sys.n() || sys.b.rows() != sys.K() || sys.b.cols() != sys.K()) {
    throw Error(ErrorCode::kInvalidSystem, "dimension mismatch between z, theta and B");
  }
  for (int label : sys.z.labels) {
    if (label < 0 || label >= sys.K()) {
      throw Error(ErrorCode::kInvalidSystem, "community label out of range");
    }
  }
}

}  // namespace detail

/// Delta = Theta Z B Z^T Theta, diagonal included.
inline ExpectedMatrix expected_adjacency(const ParameterSystem& sys) {
  detail::require_dimensions(sys);
  const int n = sys.n();
  ExpectedMatrix out{Matrix(n, n), MatrixKind::kFull};
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = sys.theta(i) * sys.theta(j) * sys.b(sys.z.labels[i], sys.z.labels[j]);
      out.m(i, j) = v;
      out.m(j, i) = v;
    }
  }
  return out;
}

inline ExpectedMatrix offdiag_project(const ExpectedMatrix& delta) {
  ExpectedMatrix out{delta.m, MatrixKind::kDiagonalDeleted};
  out.m.diagonal().setZero();
  return out;
}

/// Diagonal of the expected matrix: theta_i^2 B[z_i][z_i].
inline Vector reconstruct_diagonal(const ParameterSystem& sys) {
  detail::require_dimensions(sys);
  Vector d(sys.n());
  for (int i = 0; i < sys.n(); ++i) {
    d(i) = sys.theta(i) * sys.theta(i) * sys.b(sys.z.labels[i], sys.z.labels[i]);
  }
  return d;
}

inline bool is_symmetric(const Matrix& m) {
  return m.rows() == m.cols() && m == m.transpose();
}

}  // namespace dcsbm
