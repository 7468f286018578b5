#pragma once

// Reference checkers and instance generators. The checkers deliberately use
// other numerical kernels than the library paths they audit: normal equations
// instead of projectors, iterated Tikhonov instead of the SVD, and a Hermitian
// dilation eigen-solve for numerical rank. Generators certify their output
// with the library checkers before returning it.

#include "hmod/frame_sums.hpp"

namespace hmod::oracle {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { least, greatest };

namespace detail {

inline double max_abs_eig(const ModuleOperator& p) {
  double v = 0.0;
  for (const auto& m : p.blocks()) {
    if (m.rows() == 0) continue;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(linalg::hermitian_part(m), Eigen::EigenvaluesOnly);
    v = std::max(v, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return v;
}

inline double min_positive_eig(const ModuleOperator& q, double floor) {
  double v = std::numeric_limits<double>::infinity();
  const double scale = max_abs_eig(q);
  for (const auto& m : q.blocks()) {
    if (m.rows() == 0) continue;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(linalg::hermitian_part(m), Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (es.eigenvalues()(i) > 1e-12 * scale) v = std::min(v, es.eigenvalues()(i));
    }
  }
  return std::isinf(v) ? floor : std::max(v, floor);
}

inline double min_eig(const ModuleOperator& x) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& m : x.blocks()) {
    if (m.rows() == 0) continue;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(linalg::hermitian_part(m), Eigen::EigenvaluesOnly);
    v = std::min(v, es.eigenvalues()(0));
  }
  return v;
}

}  // namespace detail

inline constexpr double kBracketCap = 1e12;

/// Least c >= 0 with c Q - P >= 0 (Mode::least) or greatest c >= 0 with
/// P - c Q >= 0 (Mode::greatest). Infeasible least searches and unbounded
/// greatest searches return +inf; a greatest search with P not positive
/// returns -inf. Absolute accuracy 1e-8 (1 + ||P||).
inline double bisect_psd_constant(const ModuleOperator& p, const ModuleOperator& q, Mode mode) {
  const double np = detail::max_abs_eig(p), nq = detail::max_abs_eig(q);
  Eigen::Index dim = 1;
  for (const auto& m : p.blocks()) dim = std::max(dim, m.rows());
  const double eps = std::numeric_limits<double>::epsilon();
  auto feasible = [&](double c) {
    const double slack = 1e-12 * (1.0 + np) + 64.0 * eps * static_cast<double>(dim) * c * nq;
    const ModuleOperator x = mode == Mode::least ? Complex(c) * q - p : p - Complex(c) * q;
    return detail::min_eig(x) >= -slack;
  };
  const double inf = std::numeric_limits<double>::infinity();
  const double abs_tol = 1e-8 * (1.0 + np);
  double upper = (np + 1.0) / detail::min_positive_eig(q, 1e-12);
  if (mode == Mode::least) {
    if (feasible(0.0)) return 0.0;
    while (!feasible(upper)) {
      upper *= 2.0;
      if (upper > kBracketCap) return inf;
    }
    double lo = 0.0, hi = upper;
    while (hi - lo > abs_tol) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
  }
  if (!feasible(0.0)) return -inf;
  if (nq == 0.0) return inf;
  while (feasible(upper)) {
    upper *= 2.0;
    if (upper > kBracketCap) return inf;
  }
  double lo = 0.0, hi = upper;
  while (hi - lo > abs_tol) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Column-wise least squares of T against L through ridge-stabilized normal
/// equations refined by iterated Tikhonov steps; Ran(T) ⊆ Ran(L) iff every
/// column residual is at most tol (1 + column norm).
inline bool lstsq_range_inclusion(const ModuleOperator& t, const ModuleOperator& l, double tol) {
  require_same(t.codomain(), l.codomain(), "lstsq_range_inclusion");
  for (std::size_t j = 0; j < t.num_blocks(); ++j) {
    const CMatrix& a = l.block(j);
    const CMatrix& b = t.block(j);
    if (b.cols() == 0) continue;
    if (a.cols() == 0) {
      if (b.norm() > 0.0) return false;
      continue;
    }
    const CMatrix g = a.adjoint() * a;
    if (g.real().trace() == 0.0) {
      if (b.norm() > tol) return false;
      continue;
    }
    const double ridge = 1e-12 * std::max(g.real().trace(), 1e-300);
    const Eigen::LDLT<CMatrix> solver(g + ridge * CMatrix::Identity(g.rows(), g.cols()));
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      const CVector rhs = b.col(c);
      CVector x = CVector::Zero(a.cols());
      for (int it = 0; it < 12; ++it) {
        const CVector step = solver.solve(a.adjoint() * (rhs - a * x));
        x += step;
      }
      if (!((rhs - a * x).norm() <= tol * (1.0 + rhs.norm()))) return false;
    }
  }
  return true;
}

/// lim_{eps -> 0} (T*T + eps I)^{-1} T*, by iterated Tikhonov
/// X_{k+1} = (T*T + eps I)^{-1} (T* + eps X_k) with LU solves.
inline ModuleOperator ridge_pseudoinverse(const ModuleOperator& t, int iterations = 20) {
  std::vector<CMatrix> out;
  for (const auto& m : t.blocks()) {
    const CMatrix mh = m.adjoint();
    if (m.squaredNorm() == 0.0) {
      out.push_back(CMatrix::Zero(m.cols(), m.rows()));
      continue;
    }
    const double eps = 1e-8 * std::max(m.squaredNorm(), 1e-300);
    const CMatrix g = mh * m + eps * CMatrix::Identity(m.cols(), m.cols());
    const Eigen::PartialPivLU<CMatrix> lu(g);
    CMatrix x = CMatrix::Zero(m.cols(), m.rows());
    for (int it = 0; it < iterations; ++it) {
      const CMatrix rhs = mh + eps * x;
      x = lu.solve(rhs);
    }
    out.push_back(std::move(x));
  }
  return ModuleOperator(t.codomain(), t.domain(), std::move(out));
}

/// Numerical rank from the eigenvalues +-sigma of the Hermitian dilation
/// [0 M; M^H 0], with the library's relative cutoff.
inline Eigen::Index dilation_rank(const CMatrix& m) {
  if (m.size() == 0) return 0;
  const Eigen::Index r = m.rows(), c = m.cols();
  CMatrix d = CMatrix::Zero(r + c, r + c);
  d.topRightCorner(r, c) = m;
  d.bottomLeftCorner(c, r) = m.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(d, Eigen::EigenvaluesOnly);
  const RVector& ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  const double cut = kRankCutoff * static_cast<double>(std::max(r, c)) * top;
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) k += ev(i) > cut ? 1 : 0;
  return k;
}

inline std::vector<Eigen::Index> operator_rank(const ModuleOperator& t) {
  std::vector<Eigen::Index> out;
  for (const auto& m : t.blocks()) out.push_back(dilation_rank(m));
  return out;
}

// ---------------------------------------------------------------------------
// Instance generation.

enum class Kind {
  operator_,
  positive_operator,
  frame,
  parseval_frame,
  kframe_pair,
  orthogonal_parseval_pair,
  commuting_positive,
};

inline const char* to_string(Kind k) {
  switch (k) {
    case Kind::operator_: return "operator";
    case Kind::positive_operator: return "positive_operator";
    case Kind::frame: return "frame";
    case Kind::parseval_frame: return "parseval_frame";
    case Kind::kframe_pair: return "kframe_pair";
    case Kind::orthogonal_parseval_pair: return "orthogonal_parseval_pair";
    case Kind::commuting_positive: return "commuting_positive";
  }
  return "?";
}

inline Kind kind_from_string(const std::string& s) {
  for (Kind k : {Kind::operator_, Kind::positive_operator, Kind::frame, Kind::parseval_frame,
                 Kind::kframe_pair, Kind::orthogonal_parseval_pair, Kind::commuting_positive}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown instance kind '" + s + "'");
}

struct InstanceSpec {
  std::uint64_t seed = 0;
  std::vector<int> blocks{1};
  int rank = 2;
  int frame_size = 3;
  Kind kind = Kind::frame;
  double spectrum_lo = 0.5;  // singular values / eigenvalues of generated operators
  double spectrum_hi = 2.0;

  friend bool operator==(const InstanceSpec&, const InstanceSpec&) = default;
};

/// operators / frames per kind:
///   operator                  T
///   positive_operator         P
///   frame, parseval_frame     F
///   kframe_pair               K; F (a K-frame whose range strictly may exceed Ran K)
///   orthogonal_parseval_pair  K; F, G Parseval K-frames with L1 L2* = 0
///   commuting_positive        K, P; F, G with L2 = L1 P, P > 0 on the index module
struct Instance {
  Kind kind = Kind::frame;
  std::vector<ModuleOperator> operators;
  std::vector<FrameSystem> frames;
};

/// Random matrix with prescribed singular values on its leading columns/rows.
inline CMatrix with_spectrum(Rng& rng, Eigen::Index rows, Eigen::Index cols, const RVector& s) {
  const CMatrix u = rng.unitary(rows), v = rng.unitary(cols);
  CMatrix d = CMatrix::Zero(rows, cols);
  for (Eigen::Index i = 0; i < s.size(); ++i) d(i, i) = s(i);
  return u * d * v.adjoint();
}

inline RVector spectrum(Rng& rng, Eigen::Index n, double lo, double hi) {
  RVector s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = rng.uniform(lo, hi);
  return s;
}

/// Square operator with singular values in [lo, hi] and the given rank per block
/// (full rank when rank_of returns the full extent).
template <class RankOf>
ModuleOperator controlled_operator(Rng& rng, const ModuleSpace& s, double lo, double hi,
                                   RankOf rank_of) {
  std::vector<CMatrix> rep;
  for (std::size_t j = 0; j < s.num_blocks(); ++j) {
    const Eigen::Index n = s.block_extent(j);
    rep.push_back(with_spectrum(rng, n, n, spectrum(rng, rank_of(j, n), lo, hi)));
  }
  return ModuleOperator(s, s, std::move(rep));
}

inline ModuleOperator controlled_operator(Rng& rng, const ModuleSpace& s, double lo, double hi) {
  return controlled_operator(rng, s, lo, hi, [](std::size_t, Eigen::Index n) { return n; });
}

/// Invertible operator on Ran(L)'s ambient space that maps Ran(L) onto itself:
/// Q A Q* + G (I - Q Q*), A with singular values in [lo, hi], G Gaussian.
inline ModuleOperator range_preserving_operator(Rng& rng, const ModuleOperator& l, double lo, double hi) {
  std::vector<CMatrix> rep;
  for (const auto& m : l.blocks()) {
    const CMatrix q = linalg::range_basis(m);
    const Eigen::Index n = m.rows(), r = q.cols();
    const CMatrix a = with_spectrum(rng, r, r, spectrum(rng, r, lo, hi));
    const Eigen::HouseholderQR<CMatrix> qr(q);
    const CMatrix qc = (qr.householderQ() * CMatrix::Identity(n, n)).rightCols(n - r);
    const CMatrix b = with_spectrum(rng, n - r, n - r, spectrum(rng, n - r, lo, hi));
    const CMatrix g = rng.gaussian(r, n - r);
    // Upper block-triangular in the splitting Ran(L) + its complement.
    rep.push_back(q * a * q.adjoint() + (q * g + qc * b) * qc.adjoint());
  }
  return ModuleOperator(l.codomain(), l.codomain(), std::move(rep));
}

inline ModuleOperator controlled_positive(Rng& rng, const ModuleSpace& s, double lo, double hi) {
  std::vector<CMatrix> rep;
  for (std::size_t j = 0; j < s.num_blocks(); ++j) {
    const Eigen::Index n = s.block_extent(j);
    const CMatrix u = rng.unitary(n);
    rep.push_back(linalg::hermitian_part(u * spectrum(rng, n, lo, hi).cast<Complex>().asDiagonal() *
                                         u.adjoint()));
  }
  return ModuleOperator(s, s, std::move(rep));
}

inline void certify(bool ok, const char* what) {
  if (!ok) throw GenerationError(std::string("generated instance failed certification: ") + what);
}

inline Instance generate(const InstanceSpec& spec) {
  const AlgebraDescriptor desc(spec.blocks);
  const ModuleSpace x(desc, spec.rank);
  if (spec.frame_size < 1) throw GenerationError("frame size must be positive");
  const ModuleSpace idx(desc, spec.frame_size);
  const double lo = spec.spectrum_lo, hi = spec.spectrum_hi;
  if (!(lo > 0.0 && hi >= lo)) throw GenerationError("spectral range must satisfy 0 < lo <= hi");
  Rng rng(spec.seed);
  Instance out;
  out.kind = spec.kind;

  auto synthesis = [&](auto&& per_block) {
    std::vector<CMatrix> rep;
    for (std::size_t j = 0; j < desc.num_blocks(); ++j) rep.push_back(per_block(j));
    return ModuleOperator(idx, x, std::move(rep));
  };

  switch (spec.kind) {
    case Kind::operator_: {
      out.operators.push_back(controlled_operator(rng, x, lo, hi));
      certify(is_invertible(out.operators[0]), "operator rank");
      break;
    }
    case Kind::positive_operator: {
      out.operators.push_back(controlled_positive(rng, x, lo, hi));
      certify(operator_positivity(out.operators[0]), "positivity");
      break;
    }
    case Kind::frame: {
      if (spec.frame_size < spec.rank) throw GenerationError("a frame needs frame_size >= rank");
      const ModuleOperator l = synthesis([&](std::size_t j) {
        const Eigen::Index n = x.block_extent(j);
        return with_spectrum(rng, n, idx.block_extent(j), spectrum(rng, n, lo, hi));
      });
      out.frames.push_back(FrameSystem::from_synthesis(l));
      certify(frame_bounds(out.frames[0]).frame, "frame lower bound");
      break;
    }
    case Kind::parseval_frame: {
      if (spec.frame_size < spec.rank) throw GenerationError("a frame needs frame_size >= rank");
      const ModuleOperator l = synthesis([&](std::size_t j) -> CMatrix {
        return rng.unitary(idx.block_extent(j)).topRows(x.block_extent(j));
      });
      out.frames.push_back(FrameSystem::from_synthesis(l));
      certify(frame_bounds(out.frames[0]).parseval, "Parseval bounds");
      break;
    }
    case Kind::kframe_pair: {
      // K of rank r_j; the frame spans Ran K plus e_j extra directions.
      std::vector<CMatrix> krep, lrep;
      for (std::size_t j = 0; j < desc.num_blocks(); ++j) {
        const Eigen::Index n = x.block_extent(j), m = idx.block_extent(j);
        const Eigen::Index r = rng.integer(1, static_cast<int>(std::min(n, m)));
        const Eigen::Index e = rng.integer(0, static_cast<int>(std::min(n, m) - r));
        const CMatrix u = rng.unitary(n), v = rng.unitary(n);
        krep.push_back(u.leftCols(r) * spectrum(rng, r, lo, hi).cast<Complex>().asDiagonal() *
                       v.leftCols(r).adjoint());
        const CMatrix w = rng.unitary(m);
        lrep.push_back(u.leftCols(r + e) *
                       spectrum(rng, r + e, lo, hi).cast<Complex>().asDiagonal() *
                       w.leftCols(r + e).adjoint());
      }
      out.operators.push_back(ModuleOperator(x, x, std::move(krep)));
      out.frames.push_back(FrameSystem::from_synthesis(ModuleOperator(idx, x, std::move(lrep))));
      certify(kframe_check(out.frames[0], out.operators[0]).success, "K-frame");
      break;
    }
    case Kind::orthogonal_parseval_pair: {
      std::vector<CMatrix> krep, l1, l2;
      for (std::size_t j = 0; j < desc.num_blocks(); ++j) {
        const Eigen::Index n = x.block_extent(j), m = idx.block_extent(j);
        const Eigen::Index cap = std::min(n, m / 2);
        if (cap < 1) {
          throw GenerationError("orthogonal Parseval pair needs 2 rank(K) <= frame_size * block dim");
        }
        const Eigen::Index r = rng.integer(1, static_cast<int>(cap));
        const CMatrix u = rng.unitary(n), v = rng.unitary(n), w = rng.unitary(m);
        const CMatrix us = u.leftCols(r) * spectrum(rng, r, lo, hi).cast<Complex>().asDiagonal();
        krep.push_back(us * v.leftCols(r).adjoint());
        l1.push_back(us * w.leftCols(r).adjoint());
        l2.push_back(us * w.middleCols(r, r).adjoint());
      }
      const ModuleOperator k(x, x, std::move(krep));
      out.operators.push_back(k);
      out.frames.push_back(FrameSystem::from_synthesis(ModuleOperator(idx, x, std::move(l1))));
      out.frames.push_back(FrameSystem::from_synthesis(ModuleOperator(idx, x, std::move(l2))));
      certify(is_parseval_kframe(out.frames[0], k) && is_parseval_kframe(out.frames[1], k),
              "Parseval K-frames");
      certify(uniform_norm(out.frames[0].synthesis() * out.frames[1].synthesis().adjoint()) <=
                  1e-9 * (1.0 + uniform_norm(k * k.adjoint())),
              "orthogonality");
      break;
    }
    case Kind::commuting_positive: {
      Instance base = generate({spec.seed ^ 0x5bd1e995ull, spec.blocks, spec.rank, spec.frame_size,
                                Kind::kframe_pair, lo, hi});
      const ModuleOperator p = controlled_positive(rng, idx, lo, hi);
      const ModuleOperator& l1 = base.frames[0].synthesis();
      out.operators = {base.operators[0], p};
      out.frames = {base.frames[0], FrameSystem::from_synthesis(l1 * p)};
      const SumHypotheses h = sum_hypotheses(out.frames[0], out.frames[1]);
      certify(h.cross_positive && h.cross_adjoint_positive, "positive cross terms");
      certify(kframe_check(out.frames[1], out.operators[0]).success, "second K-frame");
      break;
    }
  }
  return out;
}

}  // namespace hmod::oracle
