#pragma once

// Finite frames of multipliers in A^n: analysis/synthesis/frame operators,
// frame bounds, K-frames and atomic systems.
//
// Convention: theta(xi)_i = <xi, xi_i>, so the synthesis operator theta^*
// sends the i-th basis vector of A^N to xi_i and S = theta^* theta.

#include "hmod/factorization.hpp"

#include <optional>

namespace hmod {

class FrameSystem {
 public:
  FrameSystem() = default;

  static FrameSystem build(const ModuleSpace& space, std::vector<ModuleVector> vectors) {
    if (vectors.empty()) throw DomainError("frame system needs at least one vector");
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      if (!(vectors[i].space() == space)) {
        throw ShapeError("frame vector " + std::to_string(i) + " lives in " +
                         vectors[i].space().to_string() + ", expected " + space.to_string());
      }
    }
    const ModuleSpace index(space.descriptor, static_cast<int>(vectors.size()));
    std::vector<CMatrix> rep;
    for (std::size_t j = 0; j < space.num_blocks(); ++j) {
      const Eigen::Index k = space.descriptor.block_dim(j);
      CMatrix m(space.block_extent(j), index.block_extent(j));
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        m.middleCols(static_cast<Eigen::Index>(i) * k, k) = vectors[i].block(j);
      }
      rep.push_back(std::move(m));
    }
    FrameSystem f;
    f.space_ = space;
    f.vectors_ = std::move(vectors);
    f.synthesis_ = ModuleOperator(index, space, std::move(rep));
    f.analysis_ = f.synthesis_.adjoint();
    f.frame_operator_ = f.synthesis_ * f.analysis_;
    return f;
  }

  /// The system {L e_i} of a synthesis operator L : A^N -> X.
  static FrameSystem from_synthesis(const ModuleOperator& l) {
    std::vector<ModuleVector> v;
    for (int i = 0; i < l.domain().rank; ++i) v.push_back(l(ModuleVector::basis(l.domain(), i)));
    return build(l.codomain(), std::move(v));
  }

  const ModuleSpace& space() const noexcept { return space_; }
  const std::vector<ModuleVector>& vectors() const noexcept { return vectors_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  const ModuleOperator& analysis() const noexcept { return analysis_; }
  const ModuleOperator& synthesis() const noexcept { return synthesis_; }
  const ModuleOperator& frame_operator() const noexcept { return frame_operator_; }

  /// {T xi_i}.
  FrameSystem image(const ModuleOperator& t) const {
    require_same(t.domain(), space_, "FrameSystem::image");
    std::vector<ModuleVector> v;
    for (const auto& x : vectors_) v.push_back(t(x));
    return build(t.codomain(), std::move(v));
  }

  friend bool operator==(const FrameSystem& a, const FrameSystem& b) {
    return a.space_ == b.space_ && a.vectors_ == b.vectors_;
  }

 private:
  ModuleSpace space_;
  std::vector<ModuleVector> vectors_;
  ModuleOperator synthesis_, analysis_, frame_operator_;
};

/// {xi_i + eta_i}; both systems must share space and index set.
inline FrameSystem pointwise_sum(const FrameSystem& f, const FrameSystem& g) {
  require_same(f.space(), g.space(), "pointwise_sum");
  if (f.size() != g.size()) throw ShapeError("pointwise_sum: index sets differ in length");
  std::vector<ModuleVector> v;
  for (std::size_t i = 0; i < f.size(); ++i) v.push_back(f.vectors()[i] + g.vectors()[i]);
  return FrameSystem::build(f.space(), std::move(v));
}

/// sum_i <xi, xi_i><xi_i, xi>, evaluated directly from the vectors.
inline AlgebraElement coefficient_energy(const FrameSystem& f, const ModuleVector& x) {
  AlgebraElement acc = AlgebraElement::zero(f.space().descriptor);
  for (const auto& v : f.vectors()) {
    const AlgebraElement c = inner_product(x, v);
    acc = acc + c * c.adjoint();
  }
  return acc;
}

struct FrameBounds {
  double lower = 0;   // C
  double upper = 0;   // D
  bool frame = false; // C > tol
  bool tight = false;
  bool parseval = false;
  bool optimal = false;  // C Id <= S <= D Id, and (C + 1e-6 D) Id <= S fails
};

inline FrameBounds frame_bounds(const FrameSystem& f, double tol = default_tolerance()) {
  const ModuleOperator& s = f.frame_operator();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& m : s.blocks()) {
    const linalg::Eigh e = linalg::eigh(m);
    lo = std::min(lo, e.values(0));
    hi = std::max(hi, e.values(e.values.size() - 1));
  }
  FrameBounds b;
  b.lower = std::max(lo, 0.0);
  b.upper = std::max(hi, 0.0);
  b.frame = b.lower > tol;
  b.tight = b.frame && b.upper - b.lower <= tol * (1.0 + b.upper);
  b.parseval = b.tight && std::abs(b.lower - 1.0) <= tol && std::abs(b.upper - 1.0) <= tol;
  const ModuleOperator id = ModuleOperator::identity(f.space());
  const bool below = operator_positivity(s - Complex(b.lower) * id, tol);
  const bool above = operator_positivity(Complex(b.upper) * id - s, tol);
  const double eps = 1e-6 * b.upper;
  const bool sharp = b.upper == 0.0 || !operator_positivity(s - Complex(b.lower + eps) * id, tol);
  b.optimal = below && above && sharp;
  return b;
}

/// Bessel inequality with bound D, as the operator statement D Id - S >= 0.
inline bool bessel_with_bound(const FrameSystem& f, double d, double tol = default_tolerance()) {
  return operator_positivity(Complex(d) * ModuleOperator::identity(f.space()) - f.frame_operator(),
                             tol);
}

struct KFrameBounds {
  double lower = 0;  // A, with A KK* <= S
  double upper = 0;  // B, with S <= B Id
  ModuleOperator k_op;
};

struct KFrameResult {
  bool success = false;
  KFrameBounds bounds;
  std::optional<ModuleVector> witness;  // xi with <S xi, xi> small against <K* xi, K* xi>
};

inline void require_on_space(const ModuleOperator& k, const ModuleSpace& s, const char* what) {
  require_same(k.domain(), s, what);
  require_same(k.codomain(), s, what);
}

/// Optimal lower K-frame bound A = max{a : S - a KK* >= 0}, upper bound from
/// the frame bounds. Success iff A is positive after normalizing S and KK* to
/// unit norm, i.e. A ||KK*|| / ||S|| > tol.
inline KFrameResult kframe_check(const FrameSystem& f, const ModuleOperator& k,
                                 double tol = default_tolerance()) {
  require_on_space(k, f.space(), "kframe_check");
  const ModuleOperator& s = f.frame_operator();
  const ModuleOperator kk = k * k.adjoint();
  KFrameResult r;
  r.bounds.k_op = k;
  r.bounds.upper = frame_bounds(f, tol).upper;
  const double nk = uniform_norm(kk), ns = uniform_norm(s);
  const double a = loewner::greatest_scale(s, kk).value_or(0.0);
  r.bounds.lower = a;
  if (nk == 0.0) {
    r.success = true;
    return r;
  }
  const double normalized = ns > 0.0 ? a * nk / ns : 0.0;
  r.success = normalized > tol;
  if (r.success) return r;
  const double probe = std::max(2.0 * normalized, 1e-6) * (ns > 0.0 ? ns : 1.0) / nk;
  const ModuleOperator gap = s - Complex(probe) * kk;
  double best = 0.0;
  for (std::size_t j = 0; j < gap.num_blocks(); ++j) {
    const linalg::Eigh e = linalg::eigh(gap.block(j));
    if (e.values(0) < best) {
      best = e.values(0);
      r.witness = ModuleVector::from_column(f.space(), j, e.vectors.col(0));
    }
  }
  return r;
}

/// "The system is a K-frame with lower bound A" decided from the optimal bound.
inline bool kframe_with_bound(const FrameSystem& f, const ModuleOperator& k, double a,
                              double tol = default_tolerance()) {
  const KFrameResult r = kframe_check(f, k, tol);
  if (a <= 0.0) return true;
  return r.bounds.lower >= a * (1.0 - 1e-8);
}

/// S = KK* within tol (1 + ||KK*||).
inline bool is_parseval_kframe(const FrameSystem& f, const ModuleOperator& k,
                               double tol = default_tolerance()) {
  const ModuleOperator kk = k * k.adjoint();
  return uniform_norm(f.frame_operator() - kk) <= tol * (1.0 + uniform_norm(kk));
}

struct AtomicCertificate {
  ModuleOperator coefficient_map;  // Q with K = theta^* Q
  double bound = 0;                // C = ||Q||^2
  ModuleOperator k_op;
  ModuleOperator synthesis;        // frame the certificate was issued for
  double residual = 0;             // ||theta^* Q - K||
};

struct AtomicResult {
  bool success = false;
  std::optional<AtomicCertificate> certificate;
  double inclusion_residual = 0;
  std::ptrdiff_t column = -1;
  bool inequality_holds = false;   // sampled seminorm inequality with C = ||Q||^2
  std::optional<ModuleVector> witness;  // refutes the inequality for every C <= 1e8
};

inline constexpr double kAtomicWitnessScale = 1e8;

/// Max over seminorms of p_j(K* xi)^2 - C p_j(<S xi, xi>), relative to 1 + rhs.
inline double atomic_inequality_excess(const FrameSystem& f, const ModuleOperator& k, double c,
                                       const ModuleVector& xi) {
  const SeminormVector lhs = module_seminorm(k.adjoint()(xi));
  const SeminormVector rhs = seminorm_family(inner_product(f.frame_operator()(xi), xi));
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < lhs.size(); ++j) {
    worst = std::max(worst, (lhs[j] * lhs[j] - c * rhs[j]) / (1.0 + c * rhs[j]));
  }
  return worst;
}

/// Decides whether F is an atomic system for K by solving K = theta^* Q.
inline AtomicResult atomic_system_check(const FrameSystem& f, const ModuleOperator& k,
                                        double tol = default_tolerance(), std::uint64_t seed = 0,
                                        int samples = 16) {
  require_on_space(k, f.space(), "atomic_system_check");
  AtomicResult r;
  const ModuleOperator& l = f.synthesis();
  const InclusionResidual inc = range_inclusion_residual(k, l, tol);
  r.inclusion_residual = inc.residual;
  r.column = inc.column;
  if (inc.residual <= tol * (1.0 + uniform_norm(k))) {
    const DouglasSolution d = douglas_solve(k, l, tol);
    AtomicCertificate c{d.factor, d.majorization_constant * d.majorization_constant, k, l,
                        d.residual};
    Rng rng(seed);
    r.inequality_holds = true;
    for (int s = 0; s < samples; ++s) {
      const ModuleVector xi = random_vector(rng, f.space());
      if (atomic_inequality_excess(f, k, c.bound, xi) > 1e-9) r.inequality_holds = false;
    }
    r.certificate = std::move(c);
    r.success = true;
    return r;
  }
  // A unit vector in Ran(K) orthogonal to Ran(theta^*) = Ran(S) lies in ker S
  // but not in ker K*, so no constant C can satisfy the lower inequality.
  for (std::size_t j = 0; j < k.num_blocks(); ++j) {
    const CMatrix u = linalg::range_basis(l.block(j));
    const CMatrix rest = k.block(j) - u * (u.adjoint() * k.block(j));
    Eigen::Index col;
    const double n = rest.colwise().norm().maxCoeff(&col);
    if (n > tol * (1.0 + uniform_norm(k))) {
      const ModuleVector xi = ModuleVector::from_column(f.space(), j, rest.col(col) / n);
      r.inequality_holds = !(atomic_inequality_excess(f, k, kAtomicWitnessScale, xi) > 0.0);
      r.witness = xi;
      break;
    }
  }
  return r;
}

/// m_x = Q x, the coefficients with K x = sum_i m_i xi_i.
inline ModuleVector atomic_coefficients(const FrameSystem& f, const AtomicCertificate& cert,
                                        const ModuleVector& x) {
  if (!(f.synthesis() == cert.synthesis)) {
    throw DomainError("atomic_coefficients: certificate was issued for a different system");
  }
  require_same(x.space(), f.space(), "atomic_coefficients");
  return cert.coefficient_map(x);
}

/// sum_i m_i xi_i.
inline ModuleVector synthesize(const FrameSystem& f, const ModuleVector& m) {
  return f.synthesis()(m);
}

/// {K xi_i} for a Parseval frame {xi_i}; an atomic system for K.
inline FrameSystem atomic_from_operator(const ModuleOperator& k, const FrameSystem& tight,
                                        double tol = default_tolerance()) {
  require_on_space(k, tight.space(), "atomic_from_operator");
  if (!frame_bounds(tight, tol).parseval) {
    throw DomainError("atomic_from_operator: input system is not a Parseval frame");
  }
  return tight.image(k);
}

/// Certified K-frame bounds (C / ||K||^2, D) of a frame under invertible K.
inline KFrameBounds kframe_from_frame(const FrameSystem& f, const ModuleOperator& k,
                                      double tol = default_tolerance()) {
  require_on_space(k, f.space(), "kframe_from_frame");
  const FrameBounds b = frame_bounds(f, tol);
  if (!b.frame) throw DomainError("kframe_from_frame: system is not a frame");
  if (!is_invertible(k)) throw DomainError("kframe_from_frame: K is singular");
  const double nk = uniform_norm(k);
  return {b.lower / (nk * nk), b.upper, k};
}

/// Certified L-frame bounds (A / alpha^2, B) of a K-frame when Ran(L) ⊆ Ran(K),
/// with alpha the least majorization constant LL* <= alpha^2 KK*.
inline KFrameBounds kframe_transfer(const FrameSystem& f, const ModuleOperator& k,
                                    const ModuleOperator& l, double tol = default_tolerance()) {
  require_on_space(l, f.space(), "kframe_transfer");
  const KFrameResult r = kframe_check(f, k, tol);
  if (!r.success) throw DomainError("kframe_transfer: system is not a K-frame");
  if (!range_inclusion(l, k, tol)) {
    const InclusionResidual inc = range_inclusion_residual(l, k, tol);
    throw UnsolvableError("kframe_transfer: Ran(L) is not contained in Ran(K)", inc.column);
  }
  const double alpha = min_majorization_constant(l, k);
  const double a = alpha == 0.0 ? std::numeric_limits<double>::infinity()
                                : r.bounds.lower / (alpha * alpha);
  return {a, r.bounds.upper, l};
}

/// Minimum of S compressed to Ran(K) against A ||K^+||^{-2}.
inline VerificationReport restricted_invertibility(const FrameSystem& f, const ModuleOperator& k,
                                                   double tol = default_tolerance()) {
  VerificationReport r;
  r.theorem_id = "restricted-invertibility";
  const KFrameResult kr = kframe_check(f, k, tol);
  r.flags["kframe"] = kr.success;
  if (!kr.success) {
    r.verdict = Verdict::hypotheses_not_met;
    return r;
  }
  const ModuleOperator& s = f.frame_operator();
  double least = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k.num_blocks(); ++j) {
    const CMatrix u = linalg::range_basis(k.block(j));
    if (u.cols() == 0) continue;
    least = std::min(least, linalg::min_eigenvalue(u.adjoint() * s.block(j) * u));
  }
  const double kp = uniform_norm(pseudoinverse(k));
  const double bound = kp == 0.0 ? 0.0 : kr.bounds.lower / (kp * kp);
  r.residuals["restricted_min"] = least;
  r.residuals["certified_bound"] = bound;
  r.check("bound_excess", std::isinf(least) ? 0.0 : bound - least,
          tol * (1.0 + uniform_norm(s)));
  r.settle();
  return r;
}

namespace detail {

inline double commutator_residual(const ModuleOperator& a, const ModuleOperator& b) {
  return uniform_norm(a * b - b * a);
}

inline Verdict conclude(bool hypotheses, bool conclusion) {
  if (!hypotheses) return Verdict::hypotheses_not_met;
  return conclusion ? Verdict::pass : Verdict::fail;
}

}  // namespace detail

/// The four image theorems for {T xi_i}: K-frame on Ran(T) when TK = KT,
/// K-frame on X for a commuting co-isometry, and surjectivity / invertibility
/// of T when K has full range and the image systems are K-frames.
inline std::vector<VerificationReport> image_kframe_check(const FrameSystem& f,
                                                          const ModuleOperator& k,
                                                          const ModuleOperator& t,
                                                          double tol = default_tolerance()) {
  require_on_space(k, f.space(), "image_kframe_check");
  require_on_space(t, f.space(), "image_kframe_check");
  const KFrameResult base = kframe_check(f, k, tol);
  const double a = base.bounds.lower;
  const ModuleOperator kk = k * k.adjoint();
  const FrameSystem g = f.image(t);
  const ModuleOperator& sg = g.frame_operator();
  const double comm = detail::commutator_residual(t, k);
  const bool commute = comm <= tol * (1.0 + uniform_norm(t) * uniform_norm(k));
  std::vector<VerificationReport> out;

  {
    VerificationReport r;
    r.theorem_id = "image-kframe-range";
    r.residuals["commutator"] = comm;
    r.flags["kframe"] = base.success;
    r.flags["commute"] = commute;
    const double tp = uniform_norm(pseudoinverse(t));
    const double c = tp == 0.0 ? 0.0 : (std::isinf(a) ? 0.0 : a / (tp * tp));
    r.residuals["certified_bound"] = c;
    double least = 0.0;
    for (std::size_t j = 0; j < t.num_blocks(); ++j) {
      const CMatrix u = linalg::range_basis(t.block(j));
      if (u.cols() == 0) continue;
      least = std::min(least, linalg::min_eigenvalue(u.adjoint() * (sg.block(j) - c * kk.block(j)) * u));
    }
    const bool holds = r.check("negative_part", -least, tol * (1.0 + uniform_norm(sg)));
    r.verdict = detail::conclude(base.success && commute, holds);
    out.push_back(std::move(r));
  }
  {
    VerificationReport r;
    r.theorem_id = "image-kframe-coisometry";
    const double co = uniform_norm(t * t.adjoint() - ModuleOperator::identity(f.space()));
    r.residuals["coisometry"] = co;
    r.residuals["commutator"] = comm;
    const bool coiso = co <= tol * (1.0 + uniform_norm(t));
    r.flags["kframe"] = base.success;
    r.flags["commute"] = commute;
    r.flags["coisometry"] = coiso;
    const double c = std::isinf(a) ? 0.0 : a;
    const bool holds = operator_positivity(sg - Complex(c) * kk, tol);
    r.flags["bound_holds"] = holds;
    r.verdict = detail::conclude(base.success && commute && coiso, holds);
    out.push_back(std::move(r));
  }
  const bool dense = has_full_range(k);
  const bool image_kframe = kframe_check(g, k, tol).success;
  {
    VerificationReport r;
    r.theorem_id = "image-kframe-surjective";
    r.flags["kframe"] = base.success;
    r.flags["dense_range"] = dense;
    r.flags["image_kframe"] = image_kframe;
    const bool surj = has_full_range(t);
    r.flags["surjective"] = surj;
    r.verdict = detail::conclude(base.success && dense && image_kframe, surj);
    out.push_back(std::move(r));
  }
  {
    VerificationReport r;
    r.theorem_id = "image-kframe-invertible";
    const bool adjoint_kframe = kframe_check(f.image(t.adjoint()), k, tol).success;
    r.flags["kframe"] = base.success;
    r.flags["dense_range"] = dense;
    r.flags["image_kframe"] = image_kframe;
    r.flags["adjoint_image_kframe"] = adjoint_kframe;
    const bool inv = is_invertible(t);
    r.flags["invertible"] = inv;
    r.verdict = detail::conclude(base.success && dense && image_kframe && adjoint_kframe, inv);
    out.push_back(std::move(r));
  }
  return out;
}

/// Atomicity for a K1 + b K2 and K1 K2 given atomicity for K1 and K2. The
/// minimal coefficient map of the combination is a Q1 + b Q2, so its bound
/// never exceeds (|a| sqrt(C1) + |b| sqrt(C2))^2; the smaller constant
/// max(|a|^2 C1, |b|^2 C2) is recorded for comparison only.
inline VerificationReport combined_atomic_check(const FrameSystem& f, const ModuleOperator& k1,
                                                const ModuleOperator& k2, Complex a, Complex b,
                                                double tol = default_tolerance()) {
  VerificationReport r;
  r.theorem_id = "atomic-combination";
  const AtomicResult r1 = atomic_system_check(f, k1, tol);
  const AtomicResult r2 = atomic_system_check(f, k2, tol);
  r.flags["atomic_k1"] = r1.success;
  r.flags["atomic_k2"] = r2.success;
  if (!r1.success || !r2.success) {
    r.verdict = Verdict::hypotheses_not_met;
    return r;
  }
  const double c1 = r1.certificate->bound, c2 = r2.certificate->bound;
  const AtomicResult rc = atomic_system_check(f, a * k1 + b * k2, tol);
  const AtomicResult rp = atomic_system_check(f, k1 * k2, tol);
  r.flags["atomic_combination"] = rc.success;
  r.flags["atomic_product"] = rp.success;
  const double proof_m = std::max(std::norm(a) * c1, std::norm(b) * c2);
  const double safe = std::pow(std::abs(a) * std::sqrt(c1) + std::abs(b) * std::sqrt(c2), 2);
  r.residuals["proof_bound"] = proof_m;
  if (rc.success) {
    const double c = rc.certificate->bound;
    r.residuals["certified_bound"] = c;
    r.flags["within_proof_bound"] = c <= proof_m * (1.0 + 1e-9) + tol;
    r.check("triangle_excess", c - safe, 1e-9 * (1.0 + safe));
  }
  r.settle({"atomic_combination", "atomic_product"});
  return r;
}

/// Canonical dual {S^{-1} xi_i} of a frame.
inline FrameSystem canonical_dual(const FrameSystem& f, double tol = default_tolerance()) {
  if (!frame_bounds(f, tol).frame) throw DomainError("canonical_dual: system is not a frame");
  return f.image(pseudoinverse(f.frame_operator()));
}

/// sum_i <x, S^{-1} xi_i> xi_i.
inline ModuleVector dual_reconstruction(const FrameSystem& f, const FrameSystem& dual,
                                        const ModuleVector& x) {
  return f.synthesis()(dual.analysis()(x));
}

/// F is a K-frame iff K = S^{1/2} U is solvable.
inline VerificationReport kframe_root_factorization(const FrameSystem& f, const ModuleOperator& k,
                                                    double tol = default_tolerance()) {
  VerificationReport r;
  r.theorem_id = "kframe-root-factorization";
  const bool kframe = kframe_check(f, k, tol).success;
  const ModuleOperator root = operator_sqrt(f.frame_operator(), tol);
  bool solved = false;
  try {
    const DouglasSolution d = douglas_solve(k, root, tol);
    solved = true;
    r.residuals["factor_norm"] = d.majorization_constant;
    r.check("factor_residual", d.residual, tol * (1.0 + uniform_norm(k)));
  } catch (const UnsolvableError&) {
  }
  r.flags["kframe"] = kframe;
  r.flags["root_factorization"] = solved;
  r.flags["agree"] = kframe == solved;
  r.settle({"agree"});
  return r;
}

}  // namespace hmod
