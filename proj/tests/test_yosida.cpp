#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <sglab/semigroup.hpp>
#include <sglab/yosida.hpp>

#include "test_support.hpp"

using namespace sglab;

namespace {

const Operator kTwoState{{-1.0, 1.0}, {1.0, -1.0}};

// exp(t A_n) x = e^{-nt} sum_k (nt)^k / k! (n R(n))^k x, summed independently
// of the exponential series.
Element poisson_representation(const Operator& a, int n, double t, const Element& x) {
  const LuFactorization lu(Operator::identity(a.dim()) * n - a);
  const double mu = n * t;
  Element term = x, sum(x.dim());
  double weight = std::exp(-mu);
  for (int k = 0; k < 4000; ++k) {
    sum.axpy(weight, term);
    if (k > mu && weight < 1e-18) break;
    term = static_cast<double>(n) * lu.solve(term);
    weight *= mu / (k + 1.0);
  }
  return sum;
}

}  // namespace

TEST(YosidaApproximant, Examples) {
  EXPECT_EQ(op_norm(yosida_approximant(Operator::zero(3), 7)), 0.0);
  EXPECT_NEAR(yosida_approximant(Operator::scalar(-1.0), 10)(0, 0), -10.0 / 11.0, 1e-14);
  EXPECT_THROW(yosida_approximant(Operator::scalar(3.0), 3), SingularOperator);
}

TEST(YosidaApproximant, NeumannBoundForQMatrix) {
  std::mt19937_64 rng(51);
  const Operator q = sglab::testing::random_q(5, rng);
  const Operator a50 = yosida_approximant(q, 50);
  EXPECT_LE(op_norm(a50 - q), op_norm(q * q) / (50.0 - op_norm(q)));
}

TEST(YosidaApproximant, ApproximantsCommute) {
  std::mt19937_64 rng(52);
  const Operator a = sglab::testing::random_dissipative(5, rng);
  const Operator an = yosida_approximant(a, 8), am = yosida_approximant(a, 33);
  EXPECT_LE(op_norm(an * am - am * an), 1e-9);
}

TEST(YosidaApproximant, FirstOrderConvergence) {
  std::mt19937_64 rng(53);
  const Operator a = sglab::testing::random_q(4, rng);
  const Element x = sglab::testing::random_element(4, rng);
  const Element ax = apply(a, x);
  std::vector<double> logn, loge;
  for (int n = 8; n <= 256; n *= 2) {
    logn.push_back(std::log(n));
    loge.push_back(std::log(sup_norm(apply(yosida_approximant(a, n), x) - ax)));
  }
  const double slope = (loge.back() - loge.front()) / (logn.back() - logn.front());
  EXPECT_NEAR(slope, -1.0, 0.2);
}

TEST(YosidaSemigroup, Examples) {
  const YosidaScheme zero = make_yosida_scheme(Operator::zero(2), {4, 16});
  const Element x{1.0, -2.0};
  EXPECT_EQ(yosida_semigroup(zero, 16, 3.0, x), x);
  const YosidaScheme scalar = make_yosida_scheme(Operator::scalar(-1.0), {10});
  EXPECT_EQ(yosida_semigroup(scalar, 10, 0.0, Element{2.0}), Element{2.0});
  EXPECT_NEAR(yosida_semigroup(scalar, 10, 1.0, Element{1.0})[0], std::exp(-10.0 / 11.0), 1e-14);
  EXPECT_NEAR(std::exp(-10.0 / 11.0), 0.4028903, 1e-7);
}

TEST(YosidaSemigroup, MatchesPoissonRepresentation) {
  std::mt19937_64 rng(54);
  for (int trial = 0; trial < 5; ++trial) {
    const Operator a = trial % 2 ? sglab::testing::random_q(5, rng) : sglab::testing::random_dissipative(5, rng);
    const YosidaScheme s = make_yosida_scheme(a, {8, 64});
    const Element x = sglab::testing::random_element(5, rng);
    for (int n : {8, 64})
      EXPECT_LE(sup_norm(yosida_semigroup(s, n, 1.5, x) - poisson_representation(a, n, 1.5, x)), 1e-11);
  }
}

TEST(YosidaSemigroup, ContractionForQMatrices) {
  std::mt19937_64 rng(55);
  const Operator q = sglab::testing::random_q(6, rng, 3.0);
  const YosidaScheme s = make_yosida_scheme(q, {4, 32, 128});
  for (int n : s.indices) {
    const Operator tn = exp_series_matrix(s.approximant(n), 2.0);
    EXPECT_LE(op_norm(tn), 1.0 + 1e-12);
  }
}

TEST(YosidaLimit, Examples) {
  const YosidaScheme zero = make_yosida_scheme(Operator::zero(2), {4, 8});
  EXPECT_EQ(yosida_limit(zero, 1.0, Element{1.0, 1.0}, 8, 4).certificate, 0.0);

  const std::vector<int> idx{4, 8, 16, 32, 64, 128};
  const YosidaScheme chain = make_yosida_scheme(kTwoState, idx);
  EXPECT_TRUE(chain.rigorous());
  const Element x{1.0, 0.0};
  const auto rows = yosida_convergence_table(chain, 1.0, x);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_LE(rows[i].true_error, rows[i].certificate);
    if (i > 0) {
      EXPECT_LT(rows[i].true_error, rows[i - 1].true_error);
    }
  }

  const YosidaScheme scalar = make_yosida_scheme(Operator::scalar(-1.0), {100});
  const double an = -100.0 / 101.0;
  const YosidaLimit lim = yosida_limit(scalar, 1.0, Element{1.0}, 100, 100);
  EXPECT_NEAR(lim.limit_gap, std::abs(an + 1.0), 1e-14);
  EXPECT_LE(std::abs(std::exp(an) - std::exp(-1.0)), lim.limit_gap);
}

TEST(YosidaLimit, CauchyCertificateBoundsPairGap) {
  std::mt19937_64 rng(56);
  const Operator a = sglab::testing::random_dissipative(4, rng);
  const YosidaScheme s = make_yosida_scheme(a, {16, 64});
  const Element x = sglab::testing::random_element(4, rng);
  const YosidaLimit lim = yosida_limit(s, 2.0, x, 64, 16);
  EXPECT_EQ(lim.n, 64);
  EXPECT_LE(sup_norm(yosida_semigroup(s, 64, 2.0, x) - yosida_semigroup(s, 16, 2.0, x)), lim.certificate);
}

TEST(YosidaLimit, UncertifiedBoundIsHeuristic) {
  const YosidaScheme s = make_yosida_scheme(Operator{{-1.0, 4.0}, {0.0, -1.0}}, {16}, {1.9, 0.0, false});
  EXPECT_FALSE(s.rigorous());
  EXPECT_FALSE(yosida_limit(s, 1.0, Element{1.0, 1.0}, 16, 16).rigorous);
}

TEST(YosidaScheme, RescalingReproducesGrowth) {
  // diag(1) with omega = 1: rescaled generator is 0, outputs carry e^{t}.
  const YosidaScheme s = make_yosida_scheme(Operator::scalar(1.0), {8}, {1.0, 1.0, true});
  EXPECT_NEAR(yosida_semigroup(s, 8, 1.5, Element{1.0})[0], std::exp(1.5), 1e-13);
  EXPECT_THROW(s.approximant(9), DomainError);
}

TEST(Equicontinuity, Examples) {
  std::mt19937_64 rng(57);
  const auto samples = sglab::testing::random_elements(4, 3, rng);
  const YosidaScheme q = make_yosida_scheme(sglab::testing::random_q(3, rng), {2, 8, 32});
  const EquicontinuityReport rq = joint_equicontinuity_scan(q, 2.0, 16, samples);
  EXPECT_TRUE(rq.pass);
  EXPECT_LE(rq.sup_ratio, 1.0 + 1e-12);
  EXPECT_NEAR(rq.resolvent_bound, 1.0, 1e-12);

  const YosidaScheme z = make_yosida_scheme(Operator::zero(3), {2, 8});
  EXPECT_EQ(joint_equicontinuity_scan(z, 2.0, 16, samples).sup_ratio, 1.0);

  const YosidaScheme d = make_yosida_scheme(Operator::scalar(1.0), {2, 8}, {1.0, 1.0, true});
  const EquicontinuityReport rd = joint_equicontinuity_scan(d, 2.0, 16, {Element{1.0}});
  EXPECT_LE(rd.sup_ratio, 1.0 + 1e-12);
  EXPECT_TRUE(rd.pass);
}

TEST(GeneratorRecovery, FirstOrderDifferenceQuotient) {
  std::mt19937_64 rng(58);
  const Operator a = sglab::testing::random_dissipative(4, rng);
  const SemigroupHandle h(a);
  const Element x = sglab::testing::random_element(4, rng);
  const Element ax = apply(a, x);
  double prev = 1e300;
  for (double step : {0.1, 0.01, 0.001}) {
    const double err = sup_norm((1.0 / step) * (h.apply(step, x) - x) - ax);
    EXPECT_LE(err, 0.5 * step * sup_norm(apply(a, ax)) * std::exp(step * op_norm(a)) * 1.01);
    EXPECT_LT(err, prev);
    prev = err;
  }
}
