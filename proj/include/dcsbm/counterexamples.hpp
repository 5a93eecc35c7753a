#pragma once

// Pairs of parameter systems that share every off-diagonal expected entry
// but are not gauge-equivalent: the three canonical small examples and a
// constructor for the size-2, isolated-row pattern.

#include <string>
#include <vector>

#include "dcsbm/equivalence.hpp"
#include "dcsbm/error.hpp"
#include "dcsbm/model.hpp"

namespace dcsbm {

enum class CounterexampleKind { kStructureAmbiguity, kDegreeAmbiguity, kSbmSingleton };

inline std::string_view to_string(CounterexampleKind kind) {
  switch (kind) {
    case CounterexampleKind::kStructureAmbiguity: return "structure_ambiguity";
    case CounterexampleKind::kDegreeAmbiguity: return "degree_ambiguity";
    case CounterexampleKind::kSbmSingleton: return "sbm_singleton";
  }
  return "unknown";
}

struct CounterexamplePair {
  ParameterSystem sys1;
  ParameterSystem sys2;
  CounterexampleKind kind;
};

namespace detail {

struct DecimalSystem {
  std::vector<int> labels;  // 1-based, as printed
  std::vector<const char*> theta;
  std::vector<std::vector<const char*>> b;
};

inline ParameterSystem parse_decimal_system(const DecimalSystem& d) {
  ParameterSystem sys;
  sys.z.K = static_cast<int>(d.b.size());
  for (int label : d.labels) sys.z.labels.push_back(label - 1);
  sys.theta.resize(static_cast<Eigen::Index>(d.theta.size()));
  for (std::size_t i = 0; i < d.theta.size(); ++i) sys.theta(i) = std::stod(d.theta[i]);
  sys.b.resize(sys.z.K, sys.z.K);
  for (int k = 0; k < sys.z.K; ++k) {
    for (int l = 0; l < sys.z.K; ++l) sys.b(k, l) = std::stod(d.b[k][l]);
  }
  return sys;
}

}  // namespace detail

inline CounterexamplePair example_fixture(int id) {
  using detail::DecimalSystem;
  switch (id) {
    case 1:
      return {detail::parse_decimal_system(DecimalSystem{
                  {1, 2, 2}, {"2", "2", "2"}, {{"0.05", "0.025"}, {"0.025", "0.05"}}}),
              detail::parse_decimal_system(DecimalSystem{
                  {1, 1, 2}, {"1", "2", "4"}, {{"0.05", "0.025"}, {"0.025", "0.05"}}}),
              CounterexampleKind::kStructureAmbiguity};
    case 2:
      return {detail::parse_decimal_system(DecimalSystem{
                  {1, 1, 2, 2}, {"1", "1", "1", "1"}, {{"0.1", "0"}, {"0", "0.4"}}}),
              detail::parse_decimal_system(DecimalSystem{
                  {1, 1, 2, 2}, {"1", "1", "1", "2"}, {{"0.1", "0"}, {"0", "0.2"}}}),
              CounterexampleKind::kDegreeAmbiguity};
    case 3:
      return {detail::parse_decimal_system(DecimalSystem{
                  {1, 2, 2}, {"1", "1", "1"}, {{"0.1", "0"}, {"0", "0.1"}}}),
              detail::parse_decimal_system(DecimalSystem{
                  {1, 2, 2}, {"1", "1", "1"}, {{"0.2", "0"}, {"0", "0.1"}}}),
              CounterexampleKind::kSbmSingleton};
    default:
      throw Error(ErrorCode::kInvalidArgument, "example id must be 1, 2 or 3");
  }
}

struct CounterexampleVerification {
  bool systems_valid = false;
  bool same_offdiag = false;
  bool inequivalent = false;
  std::optional<Difference> difference;
  std::optional<bool> b_differs;  // only checked for SBM singleton pairs

  bool passed() const {
    return systems_valid && same_offdiag && inequivalent && b_differs.value_or(true);
  }
};

inline CounterexampleVerification verify_counterexample(const CounterexamplePair& pair,
                                                        double tol = 1e-12) {
  CounterexampleVerification v;
  v.systems_valid = validate_system(pair.sys1).valid() && validate_system(pair.sys2).valid();
  if (!v.systems_valid) return v;
  v.same_offdiag = same_model_offdiag(pair.sys1, pair.sys2, tol);
  const auto eq = equivalent(pair.sys1, pair.sys2, tol);
  v.inequivalent = !eq.equivalent;
  v.difference = eq.reason;
  if (pair.kind == CounterexampleKind::kSbmSingleton) {
    v.b_differs = pair.sys1.b.rows() != pair.sys2.b.rows() ||
                  pair.sys1.b.cols() != pair.sys2.b.cols() || pair.sys1.b != pair.sys2.b;
  }
  return v;
}

/// Rescales the second member j of a two-member community k with an isolated
/// B row: theta_j -> c theta_j and B[k][k] -> B[k][k] / c. Every off-diagonal
/// expected entry is unchanged while the within-community theta ratio moves.
inline CounterexamplePair construct_size2_counterexample(const ParameterSystem& sys, int k, double c) {
  require_valid(sys);
  if (k < 0 || k >= sys.K()) throw Error(ErrorCode::kInvalidArgument, "community index out of range");
  if (!(c > 0.0) || c == 1.0 || !std::isfinite(c)) {
    throw Error(ErrorCode::kInvalidArgument, "scale must be positive and different from 1");
  }
  std::vector<int> members;
  for (int i = 0; i < sys.n(); ++i) {
    if (sys.z.labels[i] == k) members.push_back(i);
  }
  if (members.size() != 2) {
    throw Error(ErrorCode::kPatternMismatch,
                "community has " + std::to_string(members.size()) + " members, need exactly 2");
  }
  for (int l = 0; l < sys.K(); ++l) {
    if (l != k && sys.b(k, l) != 0.0) {
      throw Error(ErrorCode::kPatternMismatch,
                  "B row has a nonzero off-block entry; theta ratios are determined");
    }
  }

  CounterexamplePair pair{sys, sys, CounterexampleKind::kDegreeAmbiguity};
  pair.sys2.theta(members[1]) *= c;
  pair.sys2.b(k, k) /= c;

  const auto check = verify_counterexample(pair, 1e-12);
  if (!check.passed() || check.difference != Difference::kTheta) {
    throw Error(ErrorCode::kPatternMismatch, "constructed pair failed verification");
  }
  return pair;
}

}  // namespace dcsbm
