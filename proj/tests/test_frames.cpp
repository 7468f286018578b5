#include "test_util.hpp"

using namespace hmod;
using namespace hmod::testing;

namespace {

FrameSystem scalar_frame(int rank, std::initializer_list<std::initializer_list<Complex>> vs) {
  std::vector<ModuleVector> out;
  for (const auto& v : vs) out.push_back(scalar_vec(v));
  return FrameSystem::build(scalar_space(rank), out);
}

oracle::Instance instance(std::uint64_t seed, oracle::Kind kind, std::vector<int> blocks = {2, 1},
                          int rank = 2, int size = 5) {
  return oracle::generate({seed, std::move(blocks), rank, size, kind, 0.5, 2.0});
}

}  // namespace

TEST(FrameSystem, BuildExamples) {
  const FrameSystem basis = scalar_frame(2, {{1, 0}, {0, 1}});
  EXPECT_LT(op_norm(basis.frame_operator() - ModuleOperator::identity(scalar_space(2))), 1e-15);
  const FrameSystem dup = scalar_frame(2, {{1, 0}, {1, 0}, {0, 1}});
  EXPECT_LT(op_norm(dup.frame_operator() - diag_op({2, 1})), 1e-15);
  const FrameSystem zero = scalar_frame(1, {{0}});
  EXPECT_EQ(op_norm(zero.frame_operator()), 0.0);
  EXPECT_TRUE(bessel_with_bound(zero, 1.0));
  EXPECT_FALSE(frame_bounds(zero).frame);
  EXPECT_THROW(FrameSystem::build(scalar_space(2), {}), DomainError);
  EXPECT_THROW(FrameSystem::build(scalar_space(2), {scalar_vec({1, 0, 0})}), ShapeError);
}

TEST(FrameSystem, AnalysisSynthesisAndEnergy) {
  Rng rng(51);
  for (int i = 0; i < 20; ++i) {
    const oracle::Instance in = instance(100 + i, oracle::Kind::frame);
    const FrameSystem& f = in.frames[0];
    EXPECT_EQ(f.synthesis(), f.analysis().adjoint());
    EXPECT_TRUE(psd(f.frame_operator()));
    const ModuleVector x = random_vector(rng, f.space());
    // Direct sum of <x, xi_i><xi_i, x> against <S x, x>.
    AlgebraElement acc = AlgebraElement::zero(f.space().descriptor);
    for (const auto& v : f.vectors()) acc = acc + inner_product(x, v) * inner_product(v, x);
    const AlgebraElement rhs = inner_product(f.frame_operator()(x), x);
    EXPECT_LE(uniform_norm(acc - rhs), 1e-9 * (1.0 + uniform_norm(rhs)));
    EXPECT_LE(uniform_norm(coefficient_energy(f, x) - rhs), 1e-9 * (1.0 + uniform_norm(rhs)));
    // theta(x)_i = <x, xi_i>
    const ModuleVector c = f.analysis()(x);
    for (std::size_t k = 0; k < f.size(); ++k) {
      EXPECT_LE(uniform_norm(c.coord(static_cast<int>(k)) - inner_product(x, f.vectors()[k])), 1e-12);
    }
  }
}

TEST(FrameBounds, Examples) {
  const FrameBounds b = frame_bounds(scalar_frame(2, {{1, 0}, {0, 1}}));
  EXPECT_NEAR(b.lower, 1.0, 1e-14);
  EXPECT_NEAR(b.upper, 1.0, 1e-14);
  EXPECT_TRUE(b.parseval);
  const FrameBounds d = frame_bounds(scalar_frame(2, {{1, 0}, {1, 0}, {0, 1}}));
  EXPECT_NEAR(d.lower, 1.0, 1e-14);
  EXPECT_NEAR(d.upper, 2.0, 1e-14);
  EXPECT_TRUE(d.frame);
  EXPECT_FALSE(d.tight);
  const FrameBounds e = frame_bounds(scalar_frame(2, {{1, 0}}));
  EXPECT_FALSE(e.frame);
  EXPECT_NEAR(e.lower, 0.0, 1e-14);
}

TEST(FrameBounds, OptimalAgainstEigenvalues) {
  for (int i = 0; i < 20; ++i) {
    const FrameSystem f = instance(200 + i, oracle::Kind::frame).frames[0];
    const FrameBounds b = frame_bounds(f);
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (const auto& blk : f.frame_operator().blocks()) {
      Eigen::ComplexEigenSolver<CMatrix> es(blk);
      for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        lo = std::min(lo, es.eigenvalues()(k).real());
        hi = std::max(hi, es.eigenvalues()(k).real());
      }
    }
    EXPECT_NEAR(b.lower, lo, 1e-9 * hi);
    EXPECT_NEAR(b.upper, hi, 1e-9 * hi);
    EXPECT_TRUE(b.optimal);
    EXPECT_TRUE(bessel_with_bound(f, hi));
    EXPECT_FALSE(bessel_with_bound(f, 0.999 * hi));
  }
}

TEST(KFrame, Examples) {
  const FrameSystem dup = scalar_frame(2, {{1, 0}, {1, 0}, {0, 1}});
  const KFrameResult id = kframe_check(dup, ModuleOperator::identity(scalar_space(2)));
  EXPECT_TRUE(id.success);
  EXPECT_NEAR(id.bounds.lower, 1.0, 1e-8);
  const FrameSystem e1 = scalar_frame(2, {{1, 0}});
  const KFrameResult k = kframe_check(e1, diag_op({1, 0}));
  EXPECT_TRUE(k.success);
  EXPECT_NEAR(k.bounds.lower, 1.0, 1e-8);
  EXPECT_NEAR(k.bounds.upper, 1.0, 1e-14);
  const KFrameResult bad = kframe_check(e1, ModuleOperator::identity(scalar_space(2)));
  EXPECT_FALSE(bad.success);
  ASSERT_TRUE(bad.witness.has_value());
  const CVector w = bad.witness->block(0).col(0);
  EXPECT_NEAR(std::abs(w(0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(w(1)), 1.0, 1e-12);
}

TEST(KFrame, LowerBoundMatchesOracle) {
  for (int i = 0; i < 30; ++i) {
    const oracle::Instance in = instance(300 + i, oracle::Kind::kframe_pair, {1, 2, 3}, 2, 6);
    const FrameSystem& f = in.frames[0];
    const ModuleOperator& k = in.operators[0];
    const double a = kframe_check(f, k).bounds.lower;
    const double o = oracle::bisect_psd_constant(f.frame_operator(), k * k.adjoint(), oracle::Mode::greatest);
    EXPECT_NEAR(a, o, 1e-7 * (1.0 + o));
  }
}

TEST(KFrame, PositivityBiconditional) {
  Rng rng(52);
  int yes = 0, no = 0;
  for (int i = 0; i < 60; ++i) {
    const oracle::Instance in = instance(400 + i, oracle::Kind::kframe_pair, {2, 2}, 3, 6);
    const FrameSystem& f = in.frames[0];
    const ModuleOperator& k = in.operators[0];
    const double a = rng.uniform(0.0, 2.0) * kframe_check(f, k).bounds.lower;
    const bool lhs = kframe_with_bound(f, k, a);
    EXPECT_EQ(lhs, psd(f.frame_operator() - Complex(a) * (k * k.adjoint())));
    (lhs ? yes : no)++;
  }
  EXPECT_GT(yes, 0);
  EXPECT_GT(no, 0);
}

TEST(Atomic, Examples) {
  const FrameSystem f = instance(500, oracle::Kind::frame).frames[0];
  EXPECT_TRUE(atomic_system_check(f, f.frame_operator()).success);
  const AtomicResult z = atomic_system_check(f, ModuleOperator::zero(f.space(), f.space()));
  ASSERT_TRUE(z.success);
  EXPECT_EQ(z.certificate->bound, 0.0);
  const FrameSystem e1 = scalar_frame(2, {{1, 0}});
  const AtomicResult bad = atomic_system_check(e1, ModuleOperator::identity(scalar_space(2)));
  EXPECT_FALSE(bad.success);
  EXPECT_FALSE(bad.inequality_holds);
  ASSERT_TRUE(bad.witness.has_value());
  EXPECT_GT(atomic_inequality_excess(e1, ModuleOperator::identity(scalar_space(2)), 1e8, *bad.witness), 0.0);
}

TEST(Atomic, CoefficientsAndReconstruction) {
  Rng rng(53);
  const FrameSystem basis = scalar_frame(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  const AtomicResult r = atomic_system_check(basis, basis.frame_operator());
  ASSERT_TRUE(r.success);
  const ModuleVector x = random_vector(rng, basis.space());
  const ModuleVector m = atomic_coefficients(basis, *r.certificate, x);
  for (int i = 0; i < 3; ++i) EXPECT_LE(uniform_norm(m.coord(i) - inner_product(x, basis.vectors()[i])), 1e-12);
  EXPECT_EQ(vec_norm(atomic_coefficients(basis, *r.certificate, ModuleVector::zero(basis.space()))), 0.0);
  const FrameSystem other = scalar_frame(3, {{1, 0, 0}, {0, 1, 0}, {0, 0, 2}});
  EXPECT_THROW(atomic_coefficients(other, *r.certificate, x), DomainError);

  for (int i = 0; i < 20; ++i) {
    const oracle::Instance in = instance(600 + i, oracle::Kind::kframe_pair, {2, 1}, 3, 6);
    const FrameSystem& f = in.frames[0];
    const ModuleOperator k = in.operators[0] * random_operator(rng, f.space(), f.space());
    const AtomicResult a = atomic_system_check(f, k);
    ASSERT_TRUE(a.success);
    EXPECT_TRUE(a.inequality_holds);
    const ModuleVector y = random_vector(rng, f.space());
    const ModuleVector c = atomic_coefficients(f, *a.certificate, y);
    EXPECT_LE(vec_norm(synthesize(f, c) - k(y)), 1e-8 * (1.0 + vec_norm(k(y))));
    EXPECT_TRUE(psd(Complex(a.certificate->bound + 1e-6) * inner_product(y, y) - inner_product(c, c)));
  }
}

TEST(Atomic, FromOperator) {
  Rng rng(54);
  const FrameSystem p = instance(700, oracle::Kind::parseval_frame).frames[0];
  const ModuleOperator id = ModuleOperator::identity(p.space());
  EXPECT_TRUE(atomic_from_operator(id, p) == p);
  EXPECT_TRUE(atomic_system_check(p, id).success);
  const FrameSystem z = atomic_from_operator(ModuleOperator::zero(p.space(), p.space()), p);
  EXPECT_EQ(op_norm(z.synthesis()), 0.0);
  EXPECT_TRUE(atomic_system_check(z, ModuleOperator::zero(p.space(), p.space())).success);
  for (int i = 0; i < 10; ++i) {
    const ModuleOperator k = random_operator(rng, p.space(), p.space());
    EXPECT_TRUE(atomic_system_check(atomic_from_operator(k, p), k).success);
  }
  const FrameSystem notp = instance(701, oracle::Kind::frame).frames[0];
  if (!frame_bounds(notp).parseval) EXPECT_THROW(atomic_from_operator(id, notp), DomainError);
}

TEST(KFrameFromFrame, Scaling) {
  const FrameSystem f = instance(800, oracle::Kind::frame).frames[0];
  const FrameBounds b = frame_bounds(f);
  const ModuleOperator id = ModuleOperator::identity(f.space());
  const KFrameBounds same = kframe_from_frame(f, id);
  EXPECT_NEAR(same.lower, b.lower, 1e-12);
  EXPECT_NEAR(same.upper, b.upper, 1e-12);
  const ModuleOperator two = Complex(2.0) * id;
  EXPECT_NEAR(kframe_from_frame(f, two).lower, b.lower / 4, 1e-12);
  const double o = oracle::bisect_psd_constant(f.frame_operator(), two * two.adjoint(), oracle::Mode::greatest);
  // The bisection oracle is accurate to 1e-8 (1 + ||S||).
  EXPECT_NEAR(kframe_check(f, two).bounds.lower, o, 1e-8 * (1 + b.upper));
  EXPECT_NEAR(o, b.lower / 4, 1e-8 * (1 + b.upper));
  EXPECT_THROW(kframe_from_frame(f, ModuleOperator::zero(f.space(), f.space())), DomainError);
}

TEST(KFrameTransfer, Scaling) {
  const oracle::Instance in = instance(900, oracle::Kind::kframe_pair);
  const FrameSystem& f = in.frames[0];
  const ModuleOperator& k = in.operators[0];
  const double a = kframe_check(f, k).bounds.lower;
  EXPECT_NEAR(kframe_transfer(f, k, k).lower, a, 1e-7 * a);
  const ModuleOperator half = Complex(0.5) * k;
  EXPECT_NEAR(kframe_transfer(f, k, half).lower, 4 * a, 1e-6 * a);
  EXPECT_GE(kframe_check(f, half).bounds.lower, 4 * a * (1 - 1e-7));
}

TEST(RestrictedInvertibility, Examples) {
  const FrameSystem f = instance(1000, oracle::Kind::frame).frames[0];
  const VerificationReport r = restricted_invertibility(f, ModuleOperator::identity(f.space()));
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(r.residuals.at("restricted_min"), frame_bounds(f).lower, 1e-9);
  const VerificationReport s = restricted_invertibility(scalar_frame(2, {{1, 0}}), diag_op({1, 0}));
  EXPECT_TRUE(s.passed());
  EXPECT_NEAR(s.residuals.at("restricted_min"), 1.0, 1e-12);
  EXPECT_NEAR(s.residuals.at("certified_bound"), 1.0, 1e-7);
}

TEST(ImageKFrame, IdentityPassesEverything) {
  const FrameSystem f = instance(1100, oracle::Kind::frame).frames[0];
  Rng rng(55);
  const ModuleOperator k = oracle::controlled_positive(rng, f.space(), 0.5, 2.0);
  for (const auto& r : image_kframe_check(f, k, ModuleOperator::identity(f.space()))) {
    EXPECT_EQ(r.verdict, Verdict::pass) << r.theorem_id;
  }
}

TEST(ImageKFrame, CommutingUnitaryKeepsBound) {
  Rng rng(56);
  const FrameSystem f = instance(1101, oracle::Kind::frame).frames[0];
  const ModuleOperator k = oracle::controlled_positive(rng, f.space(), 0.5, 2.0);
  const ModuleOperator u = verify::spectral_function(
      k, [](double, Rng& g) { return std::polar(1.0, g.uniform(0.0, 6.0)); }, rng);
  const auto reports = image_kframe_check(f, k, u);
  EXPECT_EQ(reports[1].verdict, Verdict::pass);
  const double a = kframe_check(f, k).bounds.lower;
  EXPECT_GE(kframe_check(f.image(u), k).bounds.lower, a * (1 - 1e-7));
}

TEST(ImageKFrame, NonSurjectiveImageFails) {
  const FrameSystem f = scalar_frame(2, {{1, 0}, {0, 1}, {1, 1}});
  const ModuleOperator k = diag_op({1, 2});
  const auto reports = image_kframe_check(f, k, diag_op({1, 0}));
  EXPECT_FALSE(kframe_check(f.image(diag_op({1, 0})), k).success);
  EXPECT_EQ(reports[2].flags.at("image_kframe"), false);
  EXPECT_EQ(reports[2].verdict, Verdict::hypotheses_not_met);
  EXPECT_EQ(reports[0].verdict, Verdict::pass);
}

TEST(CombinedAtomic, Degenerate) {
  Rng rng(57);
  const oracle::Instance in = instance(1200, oracle::Kind::kframe_pair);
  const FrameSystem& f = in.frames[0];
  const ModuleOperator& k = in.operators[0];
  const ModuleOperator zero = ModuleOperator::zero(f.space(), f.space());
  const VerificationReport a = combined_atomic_check(f, k, k * random_operator(rng, f.space(), f.space()), 1.0, 0.0);
  EXPECT_TRUE(a.passed());
  EXPECT_NEAR(a.residuals.at("certified_bound"), atomic_system_check(f, k).certificate->bound, 1e-9);
  const VerificationReport b = combined_atomic_check(f, k, zero, Complex(0.0, 2.0), 3.0);
  EXPECT_TRUE(b.passed());
  EXPECT_NEAR(b.residuals.at("certified_bound"), 4.0 * atomic_system_check(f, k).certificate->bound, 1e-8);
}

TEST(CombinedAtomic, ProofBoundCanBeExceeded) {
  // Scalar rank 1, single vector 1: C_K = |K|^2, so a + b with a = b = 1 and
  // K1 = K2 = 1 needs C = 4 while max(|a|^2 C1, |b|^2 C2) = 1.
  const FrameSystem f = scalar_frame(1, {{1}});
  const ModuleOperator one = diag_op({1});
  const VerificationReport r = combined_atomic_check(f, one, one, 1.0, 1.0);
  EXPECT_TRUE(r.passed());
  EXPECT_FALSE(r.flags.at("within_proof_bound"));
  EXPECT_NEAR(r.residuals.at("certified_bound"), 4.0, 1e-9);
}

TEST(CanonicalDual, Reconstructs) {
  Rng rng(58);
  const FrameSystem f = instance(1300, oracle::Kind::frame).frames[0];
  const FrameSystem d = canonical_dual(f);
  const ModuleVector x = random_vector(rng, f.space());
  EXPECT_LE(vec_norm(dual_reconstruction(f, d, x) - x), 1e-9 * (1 + vec_norm(x)));
  EXPECT_THROW(canonical_dual(scalar_frame(2, {{1, 0}})), DomainError);
}

TEST(RootFactorization, AgreesWithKFrameCheck) {
  Rng rng(59);
  int yes = 0, no = 0;
  for (int i = 0; i < 30; ++i) {
    const oracle::Instance in = instance(1400 + i, oracle::Kind::kframe_pair, {2, 1}, 3, 5);
    const ModuleOperator k = i % 2 ? in.operators[0] : oracle::controlled_operator(rng, in.frames[0].space(), 0.5, 2.0);
    const VerificationReport r = kframe_root_factorization(in.frames[0], k);
    EXPECT_TRUE(r.passed());
    (r.flags.at("kframe") ? yes : no)++;
  }
  EXPECT_GT(yes, 0);
  EXPECT_GT(no, 0);
}
