#include <gtest/gtest.h>

#include <random>

#include "dcsbm/counterexamples.hpp"
#include "dcsbm/equivalence.hpp"
#include "support/random_systems.hpp"

namespace dcsbm {
namespace {

void expect_systems_near(const ParameterSystem& a, const ParameterSystem& b, double tol) {
  ASSERT_EQ(a.z, b.z);
  EXPECT_LE((a.theta - b.theta).cwiseAbs().maxCoeff(), tol);
  EXPECT_LE((a.b - b.b).cwiseAbs().maxCoeff(), tol);
}

TEST(ApplyTransform, IdentityIsNoOp) {
  const auto sys = example_fixture(1).sys1;
  const auto out = apply_transform(sys, GaugeTransform::identity(2));
  EXPECT_EQ(out.z, sys.z);
  EXPECT_EQ(out.theta, sys.theta);
  EXPECT_EQ(out.b, sys.b);
}

TEST(ApplyTransform, PureRelabeling) {
  const auto sys = example_fixture(1).sys1;
  const auto out = apply_transform(sys, {{1, 0}, {1.0, 1.0}});
  EXPECT_EQ(out.z.labels, (std::vector<int>{1, 0, 0}));
  EXPECT_EQ(out.theta, sys.theta);
  Matrix swapped(2, 2);
  swapped << sys.b(1, 1), sys.b(1, 0), sys.b(0, 1), sys.b(0, 0);
  EXPECT_EQ(out.b, swapped);
}

TEST(ApplyTransform, RejectsBadTransforms) {
  const auto sys = example_fixture(1).sys1;
  for (const GaugeTransform& g : {GaugeTransform{{0, 1}, {1.0, 0.0}}, GaugeTransform{{0, 0}, {1.0, 1.0}},
                                  GaugeTransform{{0}, {1.0}}}) {
    try {
      apply_transform(sys, g);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidTransform);
    }
  }
}

TEST(ApplyTransform, PreservesExpectedMatrix) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const auto sys = testing::random_system_sized(rng, 30, 5, 1, testing::BShape::kMixedSign);
    const auto g = testing::random_transform(rng, sys.K());
    const auto moved = apply_transform(sys, g);
    EXPECT_TRUE(validate_system(moved).valid());
    EXPECT_LE(testing::max_relative_diff(expected_adjacency(moved).m, expected_adjacency(sys).m),
              1e-12);
  }
}

TEST(ApplyTransform, ComposeAndInverse) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sys = testing::random_system_sized(rng, 20, 4, 1);
    const auto g = testing::random_transform(rng, sys.K());
    const auto h = testing::random_transform(rng, sys.K());
    expect_systems_near(apply_transform(apply_transform(sys, g), h), apply_transform(sys, compose(h, g)),
                        1e-12);
    expect_systems_near(apply_transform(apply_transform(sys, g), inverse(g)), sys, 1e-12);
  }
}

TEST(Canonicalize, FirstExampleFirstSystem) {
  // Hand application of D = diag(2, 2): theta = 2 / 2, B = 4 * (1/40) [[2, 1], [1, 2]].
  const auto form = canonicalize(example_fixture(1).sys1);
  EXPECT_EQ(form.system.z.labels, (std::vector<int>{0, 1, 1}));
  EXPECT_EQ(form.system.theta, Vector::Ones(3));
  Matrix b(2, 2);
  b << 0.2, 0.1, 0.1, 0.2;
  EXPECT_LE((form.system.b - b).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(form.transform.perm, (std::vector<int>{0, 1}));
  EXPECT_EQ(form.transform.scale, (std::vector<double>{2.0, 2.0}));
}

TEST(Canonicalize, IdempotentWithIdentityTransform) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const auto once = canonicalize(testing::random_system_sized(rng, 25, 5, 1)).system;
    const auto twice = canonicalize(once);
    EXPECT_EQ(twice.transform, GaugeTransform::identity(once.K()));
    EXPECT_EQ(twice.system.z, once.z);
    EXPECT_EQ(twice.system.theta, once.theta);
    EXPECT_EQ(twice.system.b, once.b);
  }
}

TEST(Canonicalize, TransformReproducesOutput) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const auto sys = testing::random_system_sized(rng, 25, 5, 1, testing::BShape::kMixedSign);
    const auto form = canonicalize(sys);
    const auto again = apply_transform(sys, form.transform);
    EXPECT_EQ(again.z, form.system.z);
    EXPECT_EQ(again.theta, form.system.theta);
    EXPECT_EQ(again.b, form.system.b);
  }
}

TEST(Canonicalize, ConstantOnOrbits) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sys = testing::random_system_sized(rng, 30, 5, 1, testing::BShape::kMixedSign);
    const auto g = testing::random_transform(rng, sys.K());
    const auto a = canonicalize(sys).system;
    const auto b = canonicalize(apply_transform(sys, g)).system;
    ASSERT_EQ(a.z, b.z);
    for (int i = 0; i < a.n(); ++i) EXPECT_NEAR(a.theta(i), b.theta(i), 1e-10 * (1 + a.theta(i)));
    for (int k = 0; k < a.K(); ++k) {
      for (int l = 0; l < a.K(); ++l) EXPECT_NEAR(a.b(k, l), b.b(k, l), 1e-10 * (1 + std::abs(a.b(k, l))));
    }
  }
}

TEST(Equivalent, SelfWithIdentityWitness) {
  const auto sys = example_fixture(2).sys1;
  const auto r = equivalent(sys, sys);
  ASSERT_TRUE(r.equivalent);
  EXPECT_EQ(*r.witness, GaugeTransform::identity(2));
}

TEST(Equivalent, FirstExampleDiffersInPartition) {
  const auto pair = example_fixture(1);
  const auto r = equivalent(pair.sys1, pair.sys2);
  EXPECT_FALSE(r.equivalent);
  EXPECT_EQ(r.reason, Difference::kPartition);
}

TEST(Equivalent, SecondExampleDiffersInTheta) {
  const auto pair = example_fixture(2);
  const auto r = equivalent(pair.sys1, pair.sys2);
  EXPECT_FALSE(r.equivalent);
  EXPECT_EQ(r.reason, Difference::kTheta);
}

TEST(Equivalent, DifferentCommunityCount) {
  const ParameterSystem one{{1, {0, 0, 0}}, Vector::Ones(3), Matrix::Identity(1, 1)};
  const auto r = equivalent(one, example_fixture(1).sys1);
  EXPECT_EQ(r.reason, Difference::kPartition);
}

TEST(Equivalent, WitnessMapsFirstOntoSecond) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sys = testing::random_system_sized(rng, 30, 5, 1, testing::BShape::kMixedSign);
    const auto g = testing::random_transform(rng, sys.K());
    const auto moved = apply_transform(sys, g);
    const auto r = equivalent(sys, moved);
    ASSERT_TRUE(r.equivalent);
    expect_systems_near(apply_transform(sys, *r.witness), moved, 1e-10);
    for (int k = 0; k < sys.K(); ++k) {
      EXPECT_EQ(r.witness->perm[k], g.perm[k]);
      EXPECT_NEAR(r.witness->scale[k], g.scale[k], 1e-12 * g.scale[k]);
    }
  }
}

TEST(Equivalent, RelationProperties) {
  std::mt19937_64 rng(41);
  const double tol = 1e-8;
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = testing::random_system_sized(rng, 20, 4, 1);
    const auto b = apply_transform(a, testing::random_transform(rng, a.K()));
    const auto c = apply_transform(b, testing::random_transform(rng, a.K()));
    const auto other = testing::random_system(rng, {.n = a.n(), .K = a.K(), .min_size = 1});
    EXPECT_TRUE(equivalent(a, a, 0.0).equivalent);
    EXPECT_EQ(equivalent(a, other, tol).equivalent, equivalent(other, a, tol).equivalent);
    EXPECT_EQ(equivalent(a, b, tol).equivalent, equivalent(b, a, tol).equivalent);
    if (equivalent(a, b, tol) && equivalent(b, c, tol)) EXPECT_TRUE(equivalent(a, c, 3 * tol).equivalent);
  }
}

TEST(SameModelOffdiag, Examples) {
  EXPECT_TRUE(same_model_offdiag(example_fixture(1).sys1, example_fixture(1).sys2, 1e-15));
  EXPECT_TRUE(same_model_offdiag(example_fixture(2).sys1, example_fixture(2).sys2, 1e-15));
}

TEST(SameModelOffdiag, GaugeOrbitsAgreeAndEquivalenceImpliesIt) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const auto sys = testing::random_system_sized(rng, 30, 5, 1, testing::BShape::kMixedSign);
    const auto moved = apply_transform(sys, testing::random_transform(rng, sys.K()));
    ASSERT_TRUE(equivalent(sys, moved).equivalent);
    EXPECT_TRUE(same_model_offdiag(sys, moved, 1e-12));
  }
}

TEST(SameModelOffdiag, DetectsDifference) {
  auto a = example_fixture(2).sys1;
  auto b = a;
  b.theta(0) = 1.5;
  EXPECT_FALSE(same_model_offdiag(a, b, 1e-8));
}

}  // namespace
}  // namespace dcsbm
