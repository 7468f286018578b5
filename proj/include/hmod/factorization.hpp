#pragma once

// Generalized inverses and Douglas-type factorization of adjointable module
// maps: range inclusion Ran(T) ⊆ Ran(L), majorization TT* <= a^2 LL*, and
// solvability of T = LU, together with the range-sum identity, the two-term
// factorization T = L1 U + L2 V and the order/seminorm equivalences.

#include "hmod/random.hpp"
#include "hmod/report.hpp"

#include <optional>

namespace hmod {

/// Moore-Penrose inverse, blockwise from the truncated SVD of the scalar
/// representation (singular values below the kRankCutoff threshold are zero).
inline ModuleOperator pseudoinverse(const ModuleOperator& t) {
  std::vector<CMatrix> out;
  for (const auto& m : t.blocks()) out.push_back(linalg::pinv(m));
  return ModuleOperator(t.codomain(), t.domain(), std::move(out));
}

/// Residuals of the four Moore-Penrose conditions for the pair (T, G).
inline VerificationReport mp_conditions_report(const ModuleOperator& t, const ModuleOperator& g,
                                               double tol = default_tolerance()) {
  require_same(g.domain(), t.codomain(), "mp_conditions_report");
  require_same(g.codomain(), t.domain(), "mp_conditions_report");
  VerificationReport r;
  r.theorem_id = "mp-conditions";
  const double bound = tol * (1.0 + uniform_norm(t));
  const ModuleOperator tg = t * g;
  const ModuleOperator gt = g * t;
  r.check("tgt", uniform_norm(tg * t - t), bound);
  r.check("gtg", uniform_norm(gt * g - g), bound);
  r.check("tg_self_adjoint", uniform_norm(tg.adjoint() - tg), bound);
  r.check("gt_self_adjoint", uniform_norm(gt.adjoint() - gt), bound);
  r.settle();
  return r;
}

struct InclusionResidual {
  double residual = 0.0;          // ||L L^+ T - T||_inf
  std::ptrdiff_t column = -1;     // first offending scalar-representation column
};

inline InclusionResidual range_inclusion_residual(const ModuleOperator& t, const ModuleOperator& l,
                                                  double tol) {
  require_same(t.codomain(), l.codomain(), "range_inclusion");
  InclusionResidual out;
  const double bound = tol * (1.0 + uniform_norm(t));
  std::ptrdiff_t offset = 0;
  for (std::size_t j = 0; j < t.num_blocks(); ++j) {
    const CMatrix u = linalg::range_basis(l.block(j));
    const CMatrix rest = t.block(j) - u * (u.adjoint() * t.block(j));
    out.residual = std::max(out.residual, linalg::spectral_norm(rest));
    if (out.column < 0) {
      for (Eigen::Index c = 0; c < rest.cols(); ++c) {
        if (rest.col(c).norm() > bound) {
          out.column = offset + c;
          break;
        }
      }
    }
    offset += t.block(j).cols();
  }
  return out;
}

/// Ran(T) ⊆ Ran(L), decided by the projector test ||L L^+ T - T|| <= tol (1 + ||T||).
inline bool range_inclusion(const ModuleOperator& t, const ModuleOperator& l,
                            double tol = default_tolerance()) {
  return range_inclusion_residual(t, l, tol).residual <= tol * (1.0 + uniform_norm(t));
}

struct DouglasSolution {
  ModuleOperator factor;            // U with T = L U
  double majorization_constant = 0; // ||U||_inf
  double residual = 0;              // ||L U - T||_inf
};

/// Solves T = L U with the minimal-norm factor U = L^+ T.
inline DouglasSolution douglas_solve(const ModuleOperator& t, const ModuleOperator& l,
                                     double tol = default_tolerance()) {
  const InclusionResidual inc = range_inclusion_residual(t, l, tol);
  if (!(inc.residual <= tol * (1.0 + uniform_norm(t)))) {
    throw UnsolvableError("douglas_solve: Ran(T) is not contained in Ran(L); column " +
                              std::to_string(inc.column) + " of T leaves the range",
                          inc.column);
  }
  DouglasSolution s;
  s.factor = pseudoinverse(l) * t;
  s.majorization_constant = uniform_norm(s.factor);
  s.residual = uniform_norm(l * s.factor - t);
  return s;
}

namespace loewner {

// Bisection searches for optimal constants in the Loewner order on
// per-block Hermitian pairs. Both operators are normalized to unit norm first;
// the PSD test then allows an eigenvalue deficit of tau(c), which covers the
// backward error of the eigensolver at scale 1 + c.

inline constexpr double kScaleCap = 1e8;

inline double slack(double c, Eigen::Index dim) {
  return 1e-14 + 4.0 * static_cast<double>(dim) * std::numeric_limits<double>::epsilon() * (1.0 + c);
}

inline Eigen::Index max_extent(const ModuleOperator& p) {
  Eigen::Index d = 1;
  for (const auto& m : p.blocks()) d = std::max(d, m.rows());
  return d;
}

/// min over blocks of lambda_min(x P + y Q).
inline double min_eig_combination(const ModuleOperator& p, double x, const ModuleOperator& q,
                                  double y) {
  double v = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < p.num_blocks(); ++j) {
    v = std::min(v, linalg::min_eigenvalue(x * p.block(j) + y * q.block(j)));
  }
  return v;
}

inline void require_pair(const ModuleOperator& p, const ModuleOperator& q) {
  if (!p.is_square() || !q.is_square()) throw ShapeError("loewner: operators must be square");
  require_same(p.domain(), q.domain(), "loewner");
}

/// Least c >= 0 with c Q - P >= 0, or nullopt when no finite c exists.
inline std::optional<double> least_scale(const ModuleOperator& p, const ModuleOperator& q) {
  require_pair(p, q);
  const double np = uniform_norm(p), nq = uniform_norm(q);
  if (np == 0.0) return 0.0;
  if (nq == 0.0) return std::nullopt;
  const Eigen::Index dim = max_extent(p);
  auto feasible = [&](double c) {
    return min_eig_combination(p, -1.0 / np, q, c / nq) >= -slack(c, dim);
  };
  if (feasible(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > kScaleCap) return std::nullopt;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi * np / nq;
}

/// Greatest c >= 0 with P - c Q >= 0; +inf when Q = 0, nullopt when P is not positive.
inline std::optional<double> greatest_scale(const ModuleOperator& p, const ModuleOperator& q) {
  require_pair(p, q);
  const double np = uniform_norm(p), nq = uniform_norm(q);
  if (nq == 0.0) {
    if (np == 0.0 || min_eig_combination(p, 1.0 / np, q, 0.0) >= -slack(0.0, max_extent(p))) {
      return std::numeric_limits<double>::infinity();
    }
    return std::nullopt;
  }
  if (np == 0.0) return 0.0;
  const Eigen::Index dim = max_extent(p);
  auto feasible = [&](double c) {
    return min_eig_combination(p, 1.0 / np, q, -c / nq) >= -slack(c, dim);
  };
  if (!feasible(0.0)) return std::nullopt;
  double lo = 0.0, hi = 2.0;
  while (feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > kScaleCap) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo * np / nq;
}

}  // namespace loewner

/// Least a >= 0 with TT* <= a^2 LL*, by bisection; nullopt when none exists.
inline std::optional<double> majorization_bisection(const ModuleOperator& t,
                                                    const ModuleOperator& l) {
  require_same(t.codomain(), l.codomain(), "majorization_bisection");
  const auto c = loewner::least_scale(t * t.adjoint(), l * l.adjoint());
  if (!c) return std::nullopt;
  return std::sqrt(*c);
}

inline double min_majorization_constant(const ModuleOperator& t, const ModuleOperator& l) {
  const auto a = majorization_bisection(t, l);
  if (!a) {
    throw UnsolvableError("min_majorization_constant: no finite constant, Ran(T) is not in Ran(L)",
                          -1);
  }
  return *a;
}

/// sqrt(TT* + LL*), whose range is Ran(T) + Ran(L).
inline ModuleOperator range_sum_root(const ModuleOperator& t, const ModuleOperator& l) {
  require_same(t.codomain(), l.codomain(), "range_sum_root");
  return operator_sqrt(t * t.adjoint() + l * l.adjoint());
}

/// Verifies Ran([T L]) == Ran(sqrt(TT* + LL*)) by numerical rank and mutual
/// projector inclusion at every block.
inline VerificationReport range_sum_check(const ModuleOperator& t, const ModuleOperator& l,
                                          double tol = 1e-8) {
  VerificationReport r;
  r.theorem_id = "range-sum";
  const ModuleOperator root = range_sum_root(t, l);
  const ModuleOperator cat = hstack(t, l);
  double rank_gap = 0.0, into_root = 0.0, into_cat = 0.0;
  for (std::size_t j = 0; j < t.num_blocks(); ++j) {
    const CMatrix uc = linalg::range_basis(cat.block(j));
    const CMatrix ur = linalg::range_basis(root.block(j));
    rank_gap = std::max(rank_gap, std::abs(static_cast<double>(uc.cols() - ur.cols())));
    into_root = std::max(into_root, linalg::spectral_norm(cat.block(j) -
                                                          ur * (ur.adjoint() * cat.block(j))));
    into_cat = std::max(into_cat, linalg::spectral_norm(root.block(j) -
                                                        uc * (uc.adjoint() * root.block(j))));
  }
  r.check("rank_gap", rank_gap, 0.0);
  r.check("concat_in_root", into_root, tol * (1.0 + uniform_norm(cat)));
  r.check("root_in_concat", into_cat, tol * (1.0 + uniform_norm(root)));
  r.settle();
  return r;
}

struct TwoTermSolution {
  ModuleOperator u;  // T = L1 U + L2 V
  ModuleOperator v;
  double residual = 0;
};

/// T = L1 U + L2 V through the block system M = N W with
/// M = [T 0; 0 0] and N = [L1 L2; 0 0]; U and V are the first block column of W.
inline TwoTermSolution two_term_douglas(const ModuleOperator& t, const ModuleOperator& l1,
                                        const ModuleOperator& l2,
                                        double tol = default_tolerance()) {
  require_same(t.codomain(), l1.codomain(), "two_term_douglas");
  require_same(t.codomain(), l2.codomain(), "two_term_douglas");
  const ModuleSpace& x = t.domain();
  const ModuleSpace& y = t.codomain();
  const ModuleOperator zx = ModuleOperator::zero(x, y);
  const ModuleOperator m = vstack(hstack(t, zx), hstack(zx, zx));
  const ModuleOperator n =
      vstack(hstack(l1, l2), hstack(ModuleOperator::zero(l1.domain(), y),
                                    ModuleOperator::zero(l2.domain(), y)));
  // Ran(T) ⊆ Ran(L1) + Ran(L2) = Ran(sqrt(L1 L1* + L2 L2*)).
  if (!range_inclusion(t, range_sum_root(l1, l2), tol)) {
    const InclusionResidual inc = range_inclusion_residual(t, hstack(l1, l2), tol);
    throw UnsolvableError("two_term_douglas: Ran(T) is not contained in Ran(L1) + Ran(L2)",
                          inc.column);
  }
  const DouglasSolution w = douglas_solve(m, n, tol);
  TwoTermSolution s;
  s.u = sub_operator(w.factor, 0, x.rank, 0, l1.domain().rank);
  s.v = sub_operator(w.factor, 0, x.rank, l1.domain().rank, l2.domain().rank);
  s.residual = uniform_norm(l1 * s.u + l2 * s.v - t);
  return s;
}

struct OrderWitness {
  AlgebraElement lambda;   // f(alpha^2 - beta^2) with the ramp cutoff f
  double margin = 0;       // p_j(alpha lambda) - p_j(beta lambda) > 0
  std::size_t seminorm = 0;
  double spectral_max = 0; // m = max sp(alpha^2 - beta^2)
};

/// For positive alpha, beta with alpha^2 <= beta^2 false, builds lambda from
/// the top of the spectrum of alpha^2 - beta^2 and returns the first seminorm
/// (lowest block index) where p(alpha lambda) > p(beta lambda). Returns
/// nullopt when alpha^2 <= beta^2.
inline std::optional<OrderWitness> order_violation_witness(const AlgebraElement& alpha,
                                                           const AlgebraElement& beta,
                                                           double tol = default_tolerance()) {
  require_same(alpha.descriptor(), beta.descriptor(), "order_violation_witness");
  if (!is_positive(alpha, tol) || !is_positive(beta, tol)) {
    throw DomainError("order_violation_witness: inputs must be positive");
  }
  const AlgebraElement a2 = alpha * alpha, b2 = beta * beta;
  if (order_leq(a2, b2, tol)) return std::nullopt;
  const AlgebraElement diff = a2 - b2;
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& blk : diff.blocks()) m = std::max(m, linalg::max_eigenvalue(blk));
  OrderWitness w;
  w.spectral_max = m;
  w.lambda = functional_calculus(diff, ramp_cutoff(m), tol);
  const SeminormVector pa = seminorm_family(alpha * w.lambda);
  const SeminormVector pb = seminorm_family(beta * w.lambda);
  for (std::size_t j = 0; j < pa.size(); ++j) {
    if (pa[j] > pb[j]) {
      w.margin = pa[j] - pb[j];
      w.seminorm = j;
      return w;
    }
  }
  throw NumericalError("order_violation_witness: cutoff element produced no strict violation");
}

/// Decides TT* <= LL* and certifies the equivalent seminorm statement
/// p̄(T* xi) <= p̄(L* xi) for all xi: by sampling when the order holds, by an
/// eigenvector witness of LL* - TT* when it fails.
inline VerificationReport order_seminorm_equivalence(const ModuleOperator& t,
                                                     const ModuleOperator& l,
                                                     double tol = default_tolerance(),
                                                     std::uint64_t seed = 0, int samples = 32) {
  require_same(t.codomain(), l.codomain(), "order_seminorm_equivalence");
  VerificationReport r;
  r.theorem_id = "order-seminorm-equivalence";
  r.seed = seed;
  const ModuleOperator gap = l * l.adjoint() - t * t.adjoint();
  const bool order = operator_positivity(gap, tol);
  r.flags["order_holds"] = order;
  const ModuleOperator ts = t.adjoint(), ls = l.adjoint();
  if (order) {
    Rng rng(seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
      const ModuleVector xi = random_vector(rng, t.codomain());
      const SeminormVector a = module_seminorm(ts(xi)), b = module_seminorm(ls(xi));
      for (std::size_t j = 0; j < a.size(); ++j) {
        worst = std::max(worst, a[j] - b[j] - tol * (1.0 + b[j]));
      }
    }
    r.residuals["sample_excess"] = worst;
    r.flags["seminorm_inequality_holds"] = worst <= 0.0;
    r.verdict = worst <= 0.0 ? Verdict::pass : Verdict::fail;
    return r;
  }
  // Most negative eigenvalue of LL* - TT*, lowest block on ties.
  std::size_t best_block = 0;
  double best = std::numeric_limits<double>::infinity();
  CVector v;
  for (std::size_t j = 0; j < gap.num_blocks(); ++j) {
    const linalg::Eigh e = linalg::eigh(gap.block(j));
    if (e.values.size() > 0 && e.values(0) < best) {
      best = e.values(0);
      best_block = j;
      v = e.vectors.col(0);
    }
  }
  const ModuleVector xi = ModuleVector::from_column(t.codomain(), best_block, v);
  const SeminormVector a = module_seminorm(ts(xi)), b = module_seminorm(ls(xi));
  const double violation = a[best_block] - b[best_block];
  r.residuals["min_eigenvalue"] = best;
  r.residuals["witness_violation"] = violation;
  r.flags["seminorm_inequality_holds"] = !(violation > 0.0);
  r.witnesses.emplace("xi", xi);
  r.verdict = violation > 0.0 ? Verdict::pass : Verdict::fail;
  return r;
}

}  // namespace hmod
