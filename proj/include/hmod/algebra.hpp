#pragma once

// Finite-dimensional C*-algebras realized as direct sums of full matrix
// blocks M_{k_1}(C) + ... + M_{k_r}(C). Each block carries its own C*-seminorm
// (the operator norm of that block), so the algebra has a genuine family of
// seminorms rather than a single norm.

#include "hmod/core.hpp"

#include <functional>
#include <initializer_list>
#include <sstream>
#include <utility>

namespace hmod {

class AlgebraDescriptor {
 public:
  AlgebraDescriptor() : dims_{1} {}

  explicit AlgebraDescriptor(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
    if (dims_.empty()) throw ShapeError("algebra descriptor needs at least one block");
    for (int k : dims_) {
      if (k < 1) throw ShapeError("algebra block dimensions must be positive");
    }
  }

  AlgebraDescriptor(std::initializer_list<int> block_dims)
      : AlgebraDescriptor(std::vector<int>(block_dims)) {}

  /// The complex numbers, M_1(C).
  static AlgebraDescriptor scalar() { return AlgebraDescriptor{1}; }

  const std::vector<int>& block_dims() const noexcept { return dims_; }
  std::size_t num_blocks() const noexcept { return dims_.size(); }
  int block_dim(std::size_t j) const { return dims_.at(j); }

  friend bool operator==(const AlgebraDescriptor&, const AlgebraDescriptor&) = default;

  std::string to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t j = 0; j < dims_.size(); ++j) os << (j ? "," : "") << dims_[j];
    os << ')';
    return os.str();
  }

 private:
  std::vector<int> dims_;
};

inline void require_same(const AlgebraDescriptor& a, const AlgebraDescriptor& b, const char* what) {
  if (!(a == b)) {
    throw ShapeError(std::string(what) + ": algebra mismatch " + a.to_string() + " vs " +
                     b.to_string());
  }
}

/// Per-block seminorm values p_1(a), ..., p_r(a).
struct SeminormVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t j) const { return values[j]; }
  double max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }
  friend bool operator==(const SeminormVector&, const SeminormVector&) = default;
};

class AlgebraElement {
 public:
  AlgebraElement() : AlgebraElement(zero(AlgebraDescriptor::scalar())) {}

  AlgebraElement(AlgebraDescriptor desc, std::vector<CMatrix> blocks)
      : desc_(std::move(desc)), blocks_(std::move(blocks)) {
    if (blocks_.size() != desc_.num_blocks()) {
      throw ShapeError("element has " + std::to_string(blocks_.size()) + " blocks, descriptor " +
                       desc_.to_string() + " expects " + std::to_string(desc_.num_blocks()));
    }
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
      const int k = desc_.block_dim(j);
      if (blocks_[j].rows() != k || blocks_[j].cols() != k) {
        throw ShapeError("block " + std::to_string(j) + " is not " + std::to_string(k) + "x" +
                         std::to_string(k));
      }
    }
  }

  static AlgebraElement zero(const AlgebraDescriptor& d) {
    std::vector<CMatrix> b;
    for (int k : d.block_dims()) b.push_back(CMatrix::Zero(k, k));
    return AlgebraElement(d, std::move(b));
  }

  static AlgebraElement identity(const AlgebraDescriptor& d) { return scalar(d, 1.0); }

  static AlgebraElement scalar(const AlgebraDescriptor& d, Complex c) {
    std::vector<CMatrix> b;
    for (int k : d.block_dims()) b.push_back(CMatrix::Identity(k, k) * c);
    return AlgebraElement(d, std::move(b));
  }

  const AlgebraDescriptor& descriptor() const noexcept { return desc_; }
  const std::vector<CMatrix>& blocks() const noexcept { return blocks_; }
  const CMatrix& block(std::size_t j) const { return blocks_.at(j); }

  AlgebraElement adjoint() const {
    std::vector<CMatrix> b;
    b.reserve(blocks_.size());
    for (const auto& m : blocks_) b.push_back(m.adjoint());
    return AlgebraElement(desc_, std::move(b));
  }

  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
    return zip(a, b, "add", [](const CMatrix& x, const CMatrix& y) -> CMatrix { return x + y; });
  }
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
    return zip(a, b, "sub", [](const CMatrix& x, const CMatrix& y) -> CMatrix { return x - y; });
  }
  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    return zip(a, b, "mul", [](const CMatrix& x, const CMatrix& y) -> CMatrix { return x * y; });
  }
  friend AlgebraElement operator*(Complex c, const AlgebraElement& a) {
    std::vector<CMatrix> b;
    for (const auto& m : a.blocks_) b.push_back(m * c);
    return AlgebraElement(a.desc_, std::move(b));
  }
  friend AlgebraElement operator-(const AlgebraElement& a) { return Complex(-1.0) * a; }

  /// Exact equality of every entry.
  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
    if (!(a.desc_ == b.desc_)) return false;
    for (std::size_t j = 0; j < a.blocks_.size(); ++j) {
      if (a.blocks_[j] != b.blocks_[j]) return false;
    }
    return true;
  }

 private:
  template <class Op>
  static AlgebraElement zip(const AlgebraElement& a, const AlgebraElement& b, const char* what,
                            Op op) {
    require_same(a.desc_, b.desc_, what);
    std::vector<CMatrix> out;
    out.reserve(a.blocks_.size());
    for (std::size_t j = 0; j < a.blocks_.size(); ++j) out.push_back(op(a.blocks_[j], b.blocks_[j]));
    return AlgebraElement(a.desc_, std::move(out));
  }

  AlgebraDescriptor desc_;
  std::vector<CMatrix> blocks_;
};

enum class ArithmeticKind { add, sub, mul, adjoint, scale };

/// Dispatching form of the *-algebra operations; `b` is ignored for unary kinds.
inline AlgebraElement arithmetic(const AlgebraElement& a, const AlgebraElement& b,
                                 ArithmeticKind kind, Complex c = 1.0) {
  switch (kind) {
    case ArithmeticKind::add: return a + b;
    case ArithmeticKind::sub: return a - b;
    case ArithmeticKind::mul: return a * b;
    case ArithmeticKind::adjoint: return a.adjoint();
    case ArithmeticKind::scale: return c * a;
  }
  throw std::logic_error("unknown arithmetic kind");
}

inline SeminormVector seminorm_family(const AlgebraElement& a) {
  SeminormVector s;
  for (const auto& m : a.blocks()) s.values.push_back(linalg::spectral_norm(m));
  return s;
}

/// Largest seminorm; the C*-norm of the direct sum.
inline double uniform_norm(const AlgebraElement& a) { return seminorm_family(a).max(); }

inline bool is_self_adjoint(const AlgebraElement& a, double tol) {
  for (const auto& m : a.blocks()) {
    const double norm = linalg::spectral_norm(m);
    if (linalg::spectral_norm(m - m.adjoint()) > tol * (1.0 + norm)) return false;
  }
  return true;
}

inline void require_self_adjoint(const AlgebraElement& a, double tol, const char* what) {
  if (!is_self_adjoint(a, tol)) throw DomainError(std::string(what) + ": element is not self-adjoint");
}

/// Membership in the positive cone: every block has spectrum >= -tol (1 + p_j(a)).
inline bool is_positive(const AlgebraElement& a, double tol = default_tolerance()) {
  require_self_adjoint(a, tol, "is_positive");
  for (const auto& m : a.blocks()) {
    const double norm = linalg::spectral_norm(m);
    if (linalg::min_eigenvalue(m) < -tol * (1.0 + norm)) return false;
  }
  return true;
}

/// a <= b in the order of the positive cone.
inline bool order_leq(const AlgebraElement& a, const AlgebraElement& b,
                      double tol = default_tolerance()) {
  return is_positive(b - a, tol);
}

/// Continuous functional calculus for self-adjoint elements, blockwise via
/// the spectral decomposition.
inline AlgebraElement functional_calculus(const AlgebraElement& a,
                                          const std::function<double(double)>& f,
                                          double tol = default_tolerance()) {
  require_self_adjoint(a, tol, "functional_calculus");
  std::vector<CMatrix> out;
  for (const auto& m : a.blocks()) out.push_back(linalg::hermitian_function(m, f));
  return AlgebraElement(a.descriptor(), std::move(out));
}

inline double positive_sqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

/// Continuous cutoff that vanishes on (-inf, m/2], equals 1 on [m, inf) and
/// interpolates linearly in between. Requires m > 0.
inline std::function<double(double)> ramp_cutoff(double m) {
  if (!(m > 0.0)) throw DomainError("ramp_cutoff: threshold must be positive");
  return [m](double t) {
    if (t <= 0.5 * m) return 0.0;
    if (t >= m) return 1.0;
    return (t - 0.5 * m) / (0.5 * m);
  };
}

}  // namespace hmod
