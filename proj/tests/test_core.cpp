#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <sglab/core.hpp>

#include "test_support.hpp"

using namespace sglab;
using sglab::testing::random_operator;

TEST(Element, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(Element(std::vector<double>{}), DomainError);
  EXPECT_THROW((Element{1.0, std::nan("")}), DomainError);
  EXPECT_THROW((Element{std::numeric_limits<double>::infinity()}), DomainError);
}

TEST(Operator, RejectsNonSquareRows) {
  EXPECT_THROW((Operator{{1.0, 2.0}, {3.0}}), DomainError);
}

TEST(Apply, IdentityZeroAndShift) {
  const Element x{3.0, -1.0};
  EXPECT_EQ(apply(Operator::identity(2), x), x);
  EXPECT_EQ(apply(Operator::zero(2), x), (Element{0.0, 0.0}));
  EXPECT_EQ(apply(Operator{{0.0, 1.0}, {0.0, 0.0}}, Element{0.0, 1.0}), (Element{1.0, 0.0}));
}

TEST(Apply, DimensionMismatchThrows) {
  EXPECT_THROW(apply(Operator::identity(3), Element{1.0, 2.0}), DimensionMismatch);
}

TEST(Solve, TrivialSystems) {
  EXPECT_EQ(solve(Operator::identity(2), Element{1.0, 2.0}), (Element{1.0, 2.0}));
  EXPECT_DOUBLE_EQ(solve(Operator::scalar(2.0), Element{4.0})[0], 2.0);
}

TEST(Solve, ResidualOnRandomWellConditioned) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Operator a = random_operator(5, rng) + Operator::identity(5) * 6.0;
    const Element b = sglab::testing::random_element(5, rng, 10.0);
    const Element y = solve(a, b);
    EXPECT_LE(sup_norm(apply(a, y) - b), 1e-10 * (1.0 + sup_norm(b)));
  }
}

TEST(Solve, SolveAfterApplyIsIdentity) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator a = random_operator(6, rng) + Operator::identity(6) * 3.0;
    const Element x = sglab::testing::random_element(6, rng);
    EXPECT_LE(sup_norm(solve(a, apply(a, x)) - x), 1e-9 * sup_norm(x));
  }
}

TEST(Solve, SingularThrows) {
  EXPECT_THROW(solve(Operator{{1.0, 2.0}, {2.0, 4.0}}, Element{1.0, 1.0}), SingularOperator);
  EXPECT_THROW(solve(Operator::zero(3), Element(3, 1.0)), SingularOperator);
}

TEST(Norms, Examples) {
  EXPECT_EQ(sup_norm(Element{1.0, -3.0, 2.0}), 3.0);
  EXPECT_EQ(op_norm(Operator::identity(4)), 1.0);
  EXPECT_EQ(op_norm(Operator{{-1.0, 1.0}, {1.0, -1.0}}), 2.0);
}

TEST(Norms, OperatorNormIsSubmultiplicative) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const Operator a = random_operator(4, rng, 3.0), b = random_operator(4, rng, 3.0);
    EXPECT_LE(op_norm(a * b), op_norm(a) * op_norm(b) * (1.0 + 1e-14));
  }
}

TEST(Norms, OperatorNormBoundsApply) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const Operator a = random_operator(5, rng, 2.0);
    const Element x = sglab::testing::random_element(5, rng);
    EXPECT_LE(sup_norm(apply(a, x)), op_norm(a) * sup_norm(x) * (1.0 + 1e-14));
  }
}

TEST(SpectralAbscissa, Examples) {
  EXPECT_NEAR(spectral_abscissa(Operator::diag({-1.0, -3.0})), -1.0, 1e-12);
  EXPECT_NEAR(spectral_abscissa(Operator{{-1.0, 1.0}, {1.0, -1.0}}), 0.0, 1e-12);
  EXPECT_NEAR(spectral_abscissa(Operator{{0.0, 1.0}, {-1.0, 0.0}}), 0.0, 1e-12);
}

TEST(SpectralAbscissa, ZeroForRandomQMatrices) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const Operator q = sglab::testing::random_q(2 + trial % 7, rng, 3.0);
    EXPECT_NEAR(spectral_abscissa(q), 0.0, 1e-8);
  }
}

TEST(Json, RoundTrip) {
  const Operator a{{1.0, 2.0}, {3.0, 4.0}};
  const nlohmann::json j = a;
  EXPECT_EQ(j.at("dim"), 2);
  EXPECT_EQ(j.at("entries"), nlohmann::json({1.0, 2.0, 3.0, 4.0}));
  EXPECT_EQ(j.get<Operator>(), a);
  EXPECT_EQ(operator_from_rows(operator_to_rows(a)), a);
  const Element x{1.0, -2.0};
  EXPECT_EQ(nlohmann::json(x).get<Element>(), x);
}
