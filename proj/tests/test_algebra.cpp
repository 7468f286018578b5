#include "test_util.hpp"

using namespace hmod;
using namespace hmod::testing;

TEST(Descriptor, RejectsEmptyAndNonPositive) {
  EXPECT_THROW(AlgebraDescriptor(std::vector<int>{}), ShapeError);
  EXPECT_THROW(AlgebraDescriptor({2, 0}), ShapeError);
  EXPECT_EQ(AlgebraDescriptor({2, 3}), AlgebraDescriptor({2, 3}));
  EXPECT_FALSE(AlgebraDescriptor({2, 3}) == AlgebraDescriptor({3, 2}));
}

TEST(Element, RejectsMisshapenBlocks) {
  EXPECT_THROW(AlgebraElement(AlgebraDescriptor{2}, {CMatrix::Zero(3, 3)}), ShapeError);
  EXPECT_THROW(AlgebraElement(AlgebraDescriptor{2, 1}, {CMatrix::Zero(2, 2)}), ShapeError);
}

TEST(Element, AdjointOfNilpotent) {
  CMatrix n(2, 2);
  n << 0, 1, 0, 0;
  const AlgebraElement a = single_block(n);
  CMatrix expected(2, 2);
  expected << 0, 0, 1, 0;
  EXPECT_EQ(arithmetic(a, a, ArithmeticKind::adjoint).block(0), expected);
}

TEST(Element, UnitLawsAndSelfAdjointUnit) {
  Rng rng(11);
  for (const auto& s : shapes()) {
    const AlgebraDescriptor d(s);
    const AlgebraElement one = AlgebraElement::identity(d);
    EXPECT_EQ(one.adjoint(), one);
    const AlgebraElement a = random_element(rng, d);
    EXPECT_EQ(a * one, a);
    EXPECT_EQ(one * a, a);
  }
}

TEST(Element, MismatchedDescriptorsThrow) {
  const AlgebraElement a = AlgebraElement::identity(AlgebraDescriptor{2});
  const AlgebraElement b = AlgebraElement::identity(AlgebraDescriptor{3});
  EXPECT_THROW(a + b, ShapeError);
  EXPECT_THROW(a * b, ShapeError);
}

TEST(Element, InvolutionIsAntiAutomorphism) {
  Rng rng(12);
  for (const auto& s : shapes()) {
    const AlgebraDescriptor d(s);
    for (int i = 0; i < 20; ++i) {
      const AlgebraElement a = random_element(rng, d), b = random_element(rng, d);
      const AlgebraElement lhs = (a * b).adjoint(), rhs = b.adjoint() * a.adjoint();
      for (std::size_t j = 0; j < d.num_blocks(); ++j) {
        EXPECT_LT((lhs.block(j) - rhs.block(j)).norm(), 1e-12 * (1.0 + lhs.block(j).norm()));
      }
    }
  }
}

TEST(Seminorm, UnitZeroAndDiagonal) {
  const SeminormVector u = seminorm_family(AlgebraElement::identity(AlgebraDescriptor{2, 3}));
  ASSERT_EQ(u.size(), 2u);
  EXPECT_DOUBLE_EQ(u[0], 1.0);
  EXPECT_DOUBLE_EQ(u[1], 1.0);
  const SeminormVector z = seminorm_family(AlgebraElement::zero(AlgebraDescriptor{2, 3}));
  EXPECT_EQ(z[0], 0.0);
  EXPECT_EQ(z[1], 0.0);
  CMatrix m(2, 2);
  m << 3, 0, 0, -4;
  // Independent: square root of the largest eigenvalue of a* a.
  const Eigen::SelfAdjointEigenSolver<CMatrix> es(m.adjoint() * m);
  const double expected = std::sqrt(es.eigenvalues().maxCoeff());
  EXPECT_NEAR(seminorm_family(single_block(m))[0], expected, 1e-14);
  EXPECT_NEAR(expected, 4.0, 1e-14);
}

TEST(Seminorm, CStarIdentityAndSubmultiplicativity) {
  Rng rng(13);
  for (const auto& s : shapes()) {
    const AlgebraDescriptor d(s);
    for (int i = 0; i < 20; ++i) {
      const AlgebraElement a = random_element(rng, d), b = random_element(rng, d);
      const SeminormVector pa = seminorm_family(a), pb = seminorm_family(b);
      const SeminormVector paa = seminorm_family(a.adjoint() * a), pab = seminorm_family(a * b);
      for (std::size_t j = 0; j < d.num_blocks(); ++j) {
        EXPECT_NEAR(paa[j], pa[j] * pa[j], 1e-12 * (1.0 + paa[j]));
        EXPECT_LE(pab[j], pa[j] * pb[j] * (1.0 + 1e-12));
      }
    }
  }
}

TEST(Positivity, Examples) {
  EXPECT_TRUE(is_positive(AlgebraElement::identity(AlgebraDescriptor{2, 1})));
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  EXPECT_FALSE(is_positive(single_block(m)));
  CMatrix n(2, 2);
  n << 0, 1, 0, 0;
  EXPECT_THROW(is_positive(single_block(n)), DomainError);
}

TEST(Positivity, GramElementsArePositive) {
  Rng rng(14);
  for (const auto& s : shapes()) {
    const AlgebraDescriptor d(s);
    const AlgebraElement a = random_element(rng, d);
    EXPECT_TRUE(is_positive(a.adjoint() * a));
    EXPECT_TRUE(psd(a.adjoint() * a));
  }
}

TEST(Positivity, ConjugationPreservesOrder) {
  Rng rng(15);
  int ordered = 0;
  for (const auto& s : shapes()) {
    const AlgebraDescriptor d(s);
    for (int i = 0; i < 30; ++i) {
      const AlgebraElement alpha = random_positive_element(rng, d);
      const AlgebraElement beta = alpha + random_positive_element(rng, d);
      const AlgebraElement lambda = random_element(rng, d);
      // Both sides by an independent eigenvalue computation.
      ASSERT_TRUE(psd(beta - alpha));
      ++ordered;
      const AlgebraElement lhs = lambda.adjoint() * alpha * lambda;
      const AlgebraElement rhs = lambda.adjoint() * beta * lambda;
      EXPECT_TRUE(psd(rhs - lhs));
      EXPECT_TRUE(order_leq(lhs, rhs));
    }
  }
  EXPECT_GT(ordered, 0);
}

TEST(FunctionalCalculus, IdentityAndSquareRoot) {
  Rng rng(16);
  const AlgebraElement a = random_self_adjoint_element(rng, AlgebraDescriptor{2, 3});
  const AlgebraElement fa = functional_calculus(a, [](double x) { return x; });
  for (std::size_t j = 0; j < 2; ++j) EXPECT_LT((fa.block(j) - a.block(j)).norm(), 1e-12);
  const AlgebraElement d = single_block(Eigen::Vector2d(4, 9).cast<Complex>().asDiagonal());
  const AlgebraElement r = functional_calculus(d, positive_sqrt);
  EXPECT_NEAR(r.block(0)(0, 0).real(), 2.0, 1e-14);
  EXPECT_NEAR(r.block(0)(1, 1).real(), 3.0, 1e-14);
  EXPECT_NEAR(std::abs(r.block(0)(0, 1)), 0.0, 1e-14);
}

TEST(FunctionalCalculus, RampCutoff) {
  const auto f = ramp_cutoff(3.0);
  EXPECT_EQ(f(3.0), 1.0);
  EXPECT_EQ(f(1.0), 0.0);
  EXPECT_EQ(f(-2.0), 0.0);
  EXPECT_DOUBLE_EQ(f(2.25), 0.5);
  const AlgebraElement a = single_block(Eigen::Vector3d(3, 1, -2).cast<Complex>().asDiagonal());
  const AlgebraElement l = functional_calculus(a, f);
  const CMatrix expected = Eigen::Vector3d(1, 0, 0).cast<Complex>().asDiagonal();
  EXPECT_LT((l.block(0) - expected).norm(), 1e-14);
  EXPECT_THROW(ramp_cutoff(0.0), DomainError);
}

TEST(FunctionalCalculus, RejectsNonSelfAdjoint) {
  CMatrix n(2, 2);
  n << 0, 1, 0, 0;
  EXPECT_THROW(functional_calculus(single_block(n), positive_sqrt), DomainError);
}

TEST(Random, DerivedSeedsAreStable) {
  EXPECT_EQ(derive_seed(42, "mp-conditions", 0), derive_seed(42, "mp-conditions", 0));
  EXPECT_NE(derive_seed(42, "mp-conditions", 0), derive_seed(42, "mp-conditions", 1));
  EXPECT_NE(derive_seed(42, "mp-conditions", 0), derive_seed(42, "range-sum", 0));
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.uniform(0, 1), b.uniform(0, 1));
}
