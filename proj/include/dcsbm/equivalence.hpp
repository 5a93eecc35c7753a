#pragma once

// The permutation-and-scaling gauge group acting on parameter systems:
//   Z' = Z P,  B' = P^T D B D P,  Theta' = Theta diag(Z D^-1 1).
// Systems in the same orbit produce the same expected matrix.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dcsbm/error.hpp"
#include "dcsbm/model.hpp"
#include "dcsbm/partitions.hpp"

namespace dcsbm {

inline constexpr double kDefaultEquivalenceTol = 1e-8;

// perm[k] is the new label of community k; scale[k] is D_kk.
struct GaugeTransform {
  std::vector<int> perm;
  std::vector<double> scale;

  int K() const { return static_cast<int>(perm.size()); }

  static GaugeTransform identity(int K) {
    GaugeTransform g;
    g.perm.resize(static_cast<std::size_t>(K));
    std::iota(g.perm.begin(), g.perm.end(), 0);
    g.scale.assign(static_cast<std::size_t>(K), 1.0);
    return g;
  }

  friend bool operator==(const GaugeTransform&, const GaugeTransform&) = default;
};

inline void validate_transform(const GaugeTransform& g) {
  const int K = g.K();
  if (static_cast<int>(g.scale.size()) != K) {
    throw Error(ErrorCode::kInvalidTransform, "perm and scale lengths differ");
  }
  std::vector<int> hit(static_cast<std::size_t>(K), 0);
  for (int image : g.perm) {
    if (image < 0 || image >= K || hit[image]++) {
      throw Error(ErrorCode::kInvalidTransform, "perm is not a bijection");
    }
  }
  for (double s : g.scale) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::kInvalidTransform, "scale factors must be positive");
    }
  }
}

/// (h after g): apply_transform(apply_transform(s, g), h) == apply_transform(s, compose(h, g)).
inline GaugeTransform compose(const GaugeTransform& h, const GaugeTransform& g) {
  GaugeTransform out;
  out.perm.resize(g.perm.size());
  out.scale.resize(g.scale.size());
  for (std::size_t k = 0; k < g.perm.size(); ++k) {
    out.perm[k] = h.perm[g.perm[k]];
    out.scale[k] = g.scale[k] * h.scale[g.perm[k]];
  }
  return out;
}

inline GaugeTransform inverse(const GaugeTransform& g) {
  GaugeTransform out;
  out.perm.resize(g.perm.size());
  out.scale.resize(g.scale.size());
  for (std::size_t k = 0; k < g.perm.size(); ++k) {
    out.perm[g.perm[k]] = static_cast<int>(k);
    out.scale[g.perm[k]] = 1.0 / g.scale[k];
  }
  return out;
}

inline ParameterSystem apply_transform(const ParameterSystem& sys, const GaugeTransform& g) {
  detail::require_dimensions(sys);
  if (g.K() != sys.K()) throw Error(ErrorCode::kInvalidTransform, "transform size does not match K");
  validate_transform(g);

  const int K = sys.K();
  ParameterSystem out;
  out.z.K = K;
  out.z.labels.resize(sys.z.labels.size());
  out.theta.resize(sys.n());
  for (int i = 0; i < sys.n(); ++i) {
    const int k = sys.z.labels[i];
    out.z.labels[i] = g.perm[k];
    out.theta(i) = sys.theta(i) / g.scale[k];
  }
  out.b.resize(K, K);
  // Upper triangle mirrored so the result stays exactly symmetric.
  for (int k = 0; k < K; ++k) {
    for (int l = k; l < K; ++l) {
      const double v = g.scale[k] * sys.b(k, l) * g.scale[l];
      out.b(g.perm[k], g.perm[l]) = v;
      out.b(g.perm[l], g.perm[k]) = v;
    }
  }
  return out;
}

struct CanonicalForm {
  ParameterSystem system;
  GaugeTransform transform;  // apply_transform(input, transform) == system
};

/// Orbit representative: communities numbered by their minimum member, and
/// theta fixed to 1 at each community's minimum member.
inline CanonicalForm canonicalize(const ParameterSystem& sys) {
  detail::require_dimensions(sys);
  const int K = sys.K();
  std::vector<int> first_member(static_cast<std::size_t>(K), -1);
  for (int i = 0; i < sys.n(); ++i) {
    int& f = first_member[sys.z.labels[i]];
    if (f == -1) f = i;
  }
  if (std::find(first_member.begin(), first_member.end(), -1) != first_member.end()) {
    throw Error(ErrorCode::kInvalidSystem, "every community must have at least one member");
  }

  std::vector<int> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return first_member[a] < first_member[b]; });

  GaugeTransform g;
  g.perm.resize(static_cast<std::size_t>(K));
  g.scale.resize(static_cast<std::size_t>(K));
  for (int rank = 0; rank < K; ++rank) g.perm[order[rank]] = rank;
  for (int k = 0; k < K; ++k) g.scale[k] = sys.theta(first_member[k]);

  // theta / theta is exactly 1 in IEEE arithmetic, so the anchors come out exact.
  ParameterSystem canon = apply_transform(sys, g);
  return {std::move(canon), std::move(g)};
}

enum class Difference { kDimension, kPartition, kTheta, kB };

inline std::string_view to_string(Difference d) {
  switch (d) {
    case Difference::kDimension: return "dimension";
    case Difference::kPartition: return "partition";
    case Difference::kTheta: return "theta";
    case Difference::kB: return "B";
  }
  return "unknown";
}

struct EquivalenceResult {
  bool equivalent = false;
  std::optional<GaugeTransform> witness;  // set iff equivalent
  std::optional<Difference> reason;       // set iff not equivalent

  explicit operator bool() const { return equivalent; }
};

namespace detail {

inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace detail

/// Compares canonical forms. Reals are compared with |a - b| <= tol * (1 + max(|a|, |b|)).
inline EquivalenceResult equivalent(const ParameterSystem& sys1, const ParameterSystem& sys2,
                                    double tol = kDefaultEquivalenceTol) {
  EquivalenceResult result;
  if (sys1.n() != sys2.n()) {
    result.reason = Difference::kDimension;
    return result;
  }
  if (sys1.K() != sys2.K()) {
    result.reason = Difference::kPartition;
    return result;
  }
  const auto c1 = canonicalize(sys1);
  const auto c2 = canonicalize(sys2);
  if (c1.system.z != c2.system.z) {
    result.reason = Difference::kPartition;
    return result;
  }
  for (int i = 0; i < sys1.n(); ++i) {
    if (!detail::close(c1.system.theta(i), c2.system.theta(i), tol)) {
      result.reason = Difference::kTheta;
      return result;
    }
  }
  for (int k = 0; k < sys1.K(); ++k) {
    for (int l = 0; l < sys1.K(); ++l) {
      if (!detail::close(c1.system.b(k, l), c2.system.b(k, l), tol)) {
        result.reason = Difference::kB;
        return result;
      }
    }
  }
  // Witness read off directly (rather than composing the two canonicalizing
  // transforms) so that identical inputs give an exactly identity witness.
  GaugeTransform witness;
  witness.perm = *permutation_between(sys1.z, sys2.z);
  witness.scale.assign(static_cast<std::size_t>(sys1.K()), 0.0);
  std::vector<bool> done(static_cast<std::size_t>(sys1.K()), false);
  for (int i = 0; i < sys1.n(); ++i) {
    const int k = sys1.z.labels[i];
    if (done[k]) continue;
    done[k] = true;
    witness.scale[k] = sys1.theta(i) / sys2.theta(i);
  }
  result.equivalent = true;
  result.witness = std::move(witness);
  return result;
}

/// Whether two systems agree on every off-diagonal expected entry, within an
/// absolute tolerance.
inline bool same_model_offdiag(const ParameterSystem& sys1, const ParameterSystem& sys2,
                               double tol = kDefaultEquivalenceTol) {
  if (sys1.n() != sys2.n()) return false;
  const Matrix a = offdiag_project(expected_adjacency(sys1)).m;
  const Matrix b = offdiag_project(expected_adjacency(sys2)).m;
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace dcsbm
