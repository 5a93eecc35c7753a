#include <gtest/gtest.h>

#include <random>

#include "dcsbm/counterexamples.hpp"
#include "dcsbm/model.hpp"
#include "support/random_systems.hpp"

namespace dcsbm {
namespace {

// Delta_ij = sum_k sum_l theta_i Z_ik B_kl Z_jl theta_j, straight from the
// membership matrix.
Matrix triple_loop_oracle(const ParameterSystem& sys) {
  const Matrix z = sys.z.membership_matrix();
  const int n = sys.n();
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < sys.K(); ++k) {
        for (int l = 0; l < sys.K(); ++l) acc += z(i, k) * sys.b(k, l) * z(j, l);
      }
      out(i, j) = sys.theta(i) * acc * sys.theta(j);
    }
  }
  return out;
}

TEST(ExpectedAdjacency, FirstExampleOneSystem) {
  const auto sys = example_fixture(1).sys1;
  const auto delta = expected_adjacency(sys);
  Matrix expected(3, 3);
  expected << 0.2, 0.1, 0.1,
              0.1, 0.2, 0.2,
              0.1, 0.2, 0.2;
  EXPECT_EQ(delta.kind, MatrixKind::kFull);
  EXPECT_LE((delta.m - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ExpectedAdjacency, SingleNode) {
  ParameterSystem sys{{1, {0}}, Vector::Ones(1), Matrix::Constant(1, 1, 0.37)};
  EXPECT_EQ(expected_adjacency(sys).m(0, 0), 0.37);
}

TEST(ExpectedAdjacency, MatchesTripleLoopOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto sys = testing::random_system(rng, {.n = 6, .K = 2, .min_size = 1,
                                                  .shape = testing::BShape::kMixedSign});
    const auto delta = expected_adjacency(sys);
    EXPECT_LE((delta.m - triple_loop_oracle(sys)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_TRUE(delta.m == delta.m.transpose());
  }
}

TEST(ExpectedAdjacency, DimensionMismatchThrows) {
  ParameterSystem sys{{2, {0, 1, 1}}, Vector::Ones(2), Matrix::Identity(2, 2)};
  try {
    expected_adjacency(sys);
    FAIL() << "expected InvalidSystem";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidSystem);
  }
}

TEST(ExpectedAdjacency, RankEqualsCommunityCount) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto sys = testing::random_system_sized(rng, 40, 5, 1, testing::BShape::kMixedSign);
    const auto s = Eigen::JacobiSVD<Matrix>(expected_adjacency(sys).m).singularValues();
    if (sys.K() < s.size()) EXPECT_LE(s(sys.K()), 1e-10 * s(0));
    EXPECT_GT(s(sys.K() - 1), 1e-10 * s(0));
  }
}

TEST(OffdiagProject, ZeroesDiagonalOnly) {
  const auto delta = expected_adjacency(example_fixture(1).sys1);
  const auto pd = offdiag_project(delta);
  EXPECT_EQ(pd.kind, MatrixKind::kDiagonalDeleted);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(pd.m(i, j), i == j ? 0.0 : delta.m(i, j));
  }
  EXPECT_EQ(offdiag_project({Matrix::Zero(4, 4)}).m, Matrix::Zero(4, 4));
}

TEST(OffdiagProject, IdempotentAndLinear) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix x = Matrix::NullaryExpr(5, 5, [&] { return u(rng); });
    Matrix y = Matrix::NullaryExpr(5, 5, [&] { return u(rng); });
    x = (x + x.transpose()).eval();
    y = (y + y.transpose()).eval();
    const auto px = offdiag_project({x});
    EXPECT_EQ(offdiag_project(px).m, px.m);
    const double a = 0.5, b = -2.0;
    EXPECT_EQ(offdiag_project({a * x + b * y}).m,
              a * px.m + b * offdiag_project({y}).m);
  }
}

TEST(CommunitySizes, Examples) {
  EXPECT_EQ(community_sizes(example_fixture(1).sys1.z), (std::vector<int>{1, 2}));
  EXPECT_EQ(community_sizes(example_fixture(2).sys1.z), (std::vector<int>{2, 2}));
  EXPECT_EQ(community_sizes({1, {0, 0, 0, 0, 0}}), (std::vector<int>{5}));
}

TEST(CheckMinSize, Conditions) {
  const auto z2 = example_fixture(2).sys1.z;
  EXPECT_TRUE(check_min_size(z2, 2));
  EXPECT_FALSE(check_min_size(z2, 3));
  EXPECT_FALSE(check_min_size(example_fixture(1).sys1.z, 2));
  EXPECT_TRUE(check_min_size({3, {0, 1, 2, 0, 1, 2, 0, 1, 2}}, 3));
}

TEST(CheckMinSize, ThresholdOneAlwaysHolds) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    EXPECT_TRUE(check_min_size(testing::random_assignment(rng, 20, 4, 1), 1));
  }
}

TEST(ValidateSystem, AcceptsThirdExampleSecondSystem) {
  EXPECT_TRUE(validate_system(example_fixture(3).sys2).valid());
}

TEST(ValidateSystem, RejectsZeroDegree) {
  auto sys = example_fixture(2).sys1;
  sys.theta(1) = 0.0;
  const auto report = validate_system(sys);
  ASSERT_FALSE(report.valid());
  EXPECT_EQ(report.violations.front(), "degree parameter must be positive");
}

TEST(ValidateSystem, RejectsRankDeficientB) {
  ParameterSystem sys{{2, {0, 0, 1, 1}}, Vector::Ones(4), Matrix::Ones(2, 2)};
  const auto report = validate_system(sys);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations.front(), "B rank deficient");
}

TEST(ValidateSystem, RejectsAsymmetryAndEmptyCommunity) {
  ParameterSystem sys{{3, {0, 0, 1, 1}}, Vector::Ones(4), Matrix::Identity(3, 3)};
  sys.b(0, 1) = 0.5;
  const auto report = validate_system(sys);
  EXPECT_EQ(report.violations,
            (std::vector<std::string>{"every community must have at least one member", "B not symmetric"}));
}

TEST(ValidateSystem, RankToleranceIsRelative) {
  ParameterSystem sys{{2, {0, 1}}, Vector::Ones(2), Matrix::Zero(2, 2)};
  sys.b << 1.0, 0.0, 0.0, 1e-12;
  EXPECT_FALSE(validate_system(sys).valid());
  EXPECT_TRUE(validate_system(sys, 1e-13).valid());
}

TEST(RemapLabels, AscendingOriginalOrder) {
  const auto mapped = remap_labels({7, -3, 7, 10});
  EXPECT_EQ(mapped.original, (std::vector<long long>{-3, 7, 10}));
  EXPECT_EQ(mapped.z.labels, (std::vector<int>{1, 0, 1, 2}));
  EXPECT_EQ(mapped.z.K, 3);
}

}  // namespace
}  // namespace dcsbm
