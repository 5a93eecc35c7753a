#pragma once

// Random adjacency matrices with E[A_ij] = Delta_ij off the diagonal.
//
// Generator: xoshiro256** (Blackman & Vigna), state seeded by four successive
// splitmix64 outputs starting from the user seed. Uniform doubles use the top
// 53 bits: (x >> 11) * 2^-53. Entries are visited i < j, row-major, one
// sample after another, so a (system, config) pair fixes every draw.
//   Bernoulli:   one uniform u per entry, A_ij = u < Delta_ij.
//   Poisson:     inversion by sequential search; a rate above 30 is split
//                into equal parts of at most 30 whose draws are summed.
//   ExactWeight: A_ij = Delta_ij, no draws.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "dcsbm/error.hpp"
#include "dcsbm/model.hpp"

namespace dcsbm {

class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256StarStar(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> state_{};
};

enum class Distribution { kBernoulli, kPoisson, kExactWeight };

inline std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::kBernoulli: return "bernoulli";
    case Distribution::kPoisson: return "poisson";
    case Distribution::kExactWeight: return "exact";
  }
  return "unknown";
}

struct SampleConfig {
  Distribution distribution = Distribution::kBernoulli;
  std::uint64_t seed = 0;
  int count = 1;
};

namespace detail {

inline void check_means(const Matrix& delta, Distribution dist) {
  const int n = static_cast<int>(delta.rows());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = delta(i, j);
      const bool ok = dist == Distribution::kBernoulli ? (v >= 0.0 && v <= 1.0)
                      : dist == Distribution::kPoisson ? (v >= 0.0 && std::isfinite(v))
                                                       : std::isfinite(v);
      if (!ok) {
        throw Error(ErrorCode::kRangeError,
                    "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") = " +
                        std::to_string(v) + " is not a valid " + std::string(to_string(dist)) +
                        " mean");
      }
    }
  }
}

inline double poisson_small(Xoshiro256StarStar& rng, double rate) {
  double u = rng.uniform();
  double p = std::exp(-rate);
  double cumulative = p;
  int k = 0;
  while (u >= cumulative && p > 0.0) {
    ++k;
    p *= rate / k;
    cumulative += p;
  }
  return k;
}

inline double poisson(Xoshiro256StarStar& rng, double rate) {
  if (rate == 0.0) return 0.0;
  constexpr double kChunk = 30.0;
  const int parts = static_cast<int>(std::ceil(rate / kChunk));
  const double part = rate / parts;
  double total = 0.0;
  for (int t = 0; t < parts; ++t) total += poisson_small(rng, part);
  return total;
}

}  // namespace detail

/// Streams samples one at a time; sample_adjacency collects them.
class AdjacencySampler {
 public:
  AdjacencySampler(const ParameterSystem& sys, Distribution dist, std::uint64_t seed)
      : delta_(expected_adjacency(sys).m), dist_(dist), rng_(seed) {
    detail::check_means(delta_, dist_);
  }

  Matrix next() {
    const int n = static_cast<int>(delta_.rows());
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double mean = delta_(i, j);
        double v = 0.0;
        switch (dist_) {
          case Distribution::kBernoulli: v = rng_.uniform() < mean ? 1.0 : 0.0; break;
          case Distribution::kPoisson: v = detail::poisson(rng_, mean); break;
          case Distribution::kExactWeight: v = mean; break;
        }
        a(i, j) = v;
        a(j, i) = v;
      }
    }
    return a;
  }

 private:
  Matrix delta_;
  Distribution dist_;
  Xoshiro256StarStar rng_;
};

inline std::vector<Matrix> sample_adjacency(const ParameterSystem& sys, const SampleConfig& cfg) {
  if (cfg.count < 1) throw Error(ErrorCode::kInvalidArgument, "sample count must be at least 1");
  AdjacencySampler sampler(sys, cfg.distribution, cfg.seed);
  std::vector<Matrix> samples;
  samples.reserve(static_cast<std::size_t>(cfg.count));
  for (int t = 0; t < cfg.count; ++t) samples.push_back(sampler.next());
  return samples;
}

inline ExpectedMatrix empirical_mean(const std::vector<Matrix>& samples) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyInput, "no samples");
  Matrix sum = Matrix::Zero(samples.front().rows(), samples.front().cols());
  for (const auto& s : samples) {
    if (s.rows() != sum.rows() || s.cols() != sum.cols()) {
      throw Error(ErrorCode::kInvalidArgument, "samples have different dimensions");
    }
    sum += s;
  }
  ExpectedMatrix out{sum / static_cast<double>(samples.size()), MatrixKind::kDiagonalDeleted};
  out.m.diagonal().setZero();
  return out;
}

}  // namespace dcsbm
