#pragma once

// The free Hilbert module A^n over a block algebra A, with A-valued inner
// product <xi, eta> = sum_i xi_i eta_i^*, and the adjointable module maps
// between such modules.
//
// Conventions. A is acting on the left, so an A-linear map A^n -> A^m is right
// multiplication of the row (xi_1, ..., xi_n) by an n x m matrix of algebra
// elements: (T xi)_l = sum_i xi_i T_{il}. The scalar representation of T at
// algebra block j is the transpose of the (n k_j) x (m k_j) complex matrix
// [T_{il}^{(j)}]. It is a faithful *-homomorphism: rep(S T) = rep(S) rep(T),
// rep(T^*) = rep(T)^H, and T >= 0 iff every block of rep(T) is PSD. Operators
// are stored directly in this representation; entries are derived views.
//
// A vector xi is represented at block j by the (n k_j) x k_j matrix whose i-th
// row block is (xi_i^{(j)})^T, so that rep(T xi) = rep(T) rep(xi).

#include "hmod/algebra.hpp"

namespace hmod {

struct ModuleSpace {
  AlgebraDescriptor descriptor;
  int rank = 1;

  ModuleSpace() = default;
  ModuleSpace(AlgebraDescriptor d, int n) : descriptor(std::move(d)), rank(n) {
    if (rank < 1) throw ShapeError("module rank must be >= 1");
  }

  std::size_t num_blocks() const noexcept { return descriptor.num_blocks(); }
  /// Row count of the scalar representation at block j.
  Eigen::Index block_extent(std::size_t j) const {
    return static_cast<Eigen::Index>(rank) * descriptor.block_dim(j);
  }

  friend bool operator==(const ModuleSpace&, const ModuleSpace&) = default;

  std::string to_string() const {
    return descriptor.to_string() + "^" + std::to_string(rank);
  }
};

inline void require_same(const ModuleSpace& a, const ModuleSpace& b, const char* what) {
  if (!(a == b)) {
    throw ShapeError(std::string(what) + ": module mismatch " + a.to_string() + " vs " +
                     b.to_string());
  }
}

/// Direct sum A^n + A^m = A^(n+m).
inline ModuleSpace direct_sum(const ModuleSpace& a, const ModuleSpace& b) {
  require_same(a.descriptor, b.descriptor, "direct_sum");
  return ModuleSpace(a.descriptor, a.rank + b.rank);
}

class ModuleVector {
 public:
  ModuleVector() = default;

  ModuleVector(ModuleSpace space, std::vector<AlgebraElement> coords)
      : space_(std::move(space)), coords_(std::move(coords)) {
    if (coords_.size() != static_cast<std::size_t>(space_.rank)) {
      throw ShapeError("vector has " + std::to_string(coords_.size()) + " coordinates, space " +
                       space_.to_string());
    }
    for (const auto& c : coords_) require_same(c.descriptor(), space_.descriptor, "ModuleVector");
  }

  static ModuleVector zero(const ModuleSpace& s) {
    return ModuleVector(s, std::vector<AlgebraElement>(s.rank, AlgebraElement::zero(s.descriptor)));
  }

  /// The standard basis vector e_i (1_A in coordinate i).
  static ModuleVector basis(const ModuleSpace& s, int i) {
    if (i < 0 || i >= s.rank) throw ShapeError("basis index out of range");
    ModuleVector v = zero(s);
    v.coords_[i] = AlgebraElement::identity(s.descriptor);
    return v;
  }

  /// Vector whose representation at block j has `column` as first column and
  /// is zero elsewhere.
  static ModuleVector from_column(const ModuleSpace& s, std::size_t j, const CVector& column) {
    if (column.size() != s.block_extent(j)) throw ShapeError("from_column: wrong length");
    std::vector<CMatrix> blocks;
    for (std::size_t b = 0; b < s.num_blocks(); ++b) {
      const int k = s.descriptor.block_dim(b);
      blocks.push_back(CMatrix::Zero(static_cast<Eigen::Index>(s.rank) * k, k));
    }
    blocks[j].col(0) = column;
    return from_blocks(s, blocks);
  }

  /// Inverse of block(): rebuild from per-block representations.
  static ModuleVector from_blocks(const ModuleSpace& s, const std::vector<CMatrix>& blocks) {
    if (blocks.size() != s.num_blocks()) throw ShapeError("from_blocks: wrong block count");
    std::vector<AlgebraElement> coords;
    for (int i = 0; i < s.rank; ++i) {
      std::vector<CMatrix> eb;
      for (std::size_t j = 0; j < s.num_blocks(); ++j) {
        const int k = s.descriptor.block_dim(j);
        if (blocks[j].rows() != s.block_extent(j) || blocks[j].cols() != k) {
          throw ShapeError("from_blocks: block " + std::to_string(j) + " has wrong shape");
        }
        eb.push_back(blocks[j].block(static_cast<Eigen::Index>(i) * k, 0, k, k).transpose());
      }
      coords.emplace_back(s.descriptor, std::move(eb));
    }
    return ModuleVector(s, std::move(coords));
  }

  const ModuleSpace& space() const noexcept { return space_; }
  const std::vector<AlgebraElement>& coords() const noexcept { return coords_; }
  const AlgebraElement& coord(int i) const { return coords_.at(i); }

  /// Scalar representation at algebra block j: (n k_j) x k_j.
  CMatrix block(std::size_t j) const {
    const int k = space_.descriptor.block_dim(j);
    CMatrix x(space_.block_extent(j), k);
    for (int i = 0; i < space_.rank; ++i) {
      x.block(static_cast<Eigen::Index>(i) * k, 0, k, k) = coords_[i].block(j).transpose();
    }
    return x;
  }

  friend ModuleVector operator+(const ModuleVector& a, const ModuleVector& b) {
    require_same(a.space_, b.space_, "vector add");
    std::vector<AlgebraElement> c;
    for (int i = 0; i < a.space_.rank; ++i) c.push_back(a.coords_[i] + b.coords_[i]);
    return ModuleVector(a.space_, std::move(c));
  }
  friend ModuleVector operator-(const ModuleVector& a, const ModuleVector& b) {
    require_same(a.space_, b.space_, "vector sub");
    std::vector<AlgebraElement> c;
    for (int i = 0; i < a.space_.rank; ++i) c.push_back(a.coords_[i] - b.coords_[i]);
    return ModuleVector(a.space_, std::move(c));
  }
  /// Module action a . xi.
  friend ModuleVector operator*(const AlgebraElement& a, const ModuleVector& v) {
    std::vector<AlgebraElement> c;
    for (const auto& x : v.coords_) c.push_back(a * x);
    return ModuleVector(v.space_, std::move(c));
  }
  friend ModuleVector operator*(Complex s, const ModuleVector& v) {
    std::vector<AlgebraElement> c;
    for (const auto& x : v.coords_) c.push_back(s * x);
    return ModuleVector(v.space_, std::move(c));
  }

  friend bool operator==(const ModuleVector& a, const ModuleVector& b) {
    return a.space_ == b.space_ && a.coords_ == b.coords_;
  }

 private:
  ModuleSpace space_;
  std::vector<AlgebraElement> coords_;
};

/// <xi, eta> = sum_i xi_i eta_i^*; A-linear in the first variable.
inline AlgebraElement inner_product(const ModuleVector& x, const ModuleVector& y) {
  require_same(x.space(), y.space(), "inner_product");
  AlgebraElement acc = AlgebraElement::zero(x.space().descriptor);
  for (int i = 0; i < x.space().rank; ++i) acc = acc + x.coord(i) * y.coord(i).adjoint();
  return acc;
}

/// p̄_j(xi) = sqrt(p_j(<xi, xi>)).
inline SeminormVector module_seminorm(const ModuleVector& x) {
  SeminormVector s = seminorm_family(inner_product(x, x));
  for (double& v : s.values) v = std::sqrt(std::max(v, 0.0));
  return s;
}

struct OperatorNorms {
  std::vector<double> per_seminorm;
  double uniform = 0.0;
};

class ModuleOperator {
 public:
  ModuleOperator() = default;

  /// From per-block scalar representations, rep_j of size (m k_j) x (n k_j).
  ModuleOperator(ModuleSpace domain, ModuleSpace codomain, std::vector<CMatrix> rep)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), rep_(std::move(rep)) {
    require_same(domain_.descriptor, codomain_.descriptor, "ModuleOperator");
    if (rep_.size() != domain_.num_blocks()) throw ShapeError("operator: wrong block count");
    for (std::size_t j = 0; j < rep_.size(); ++j) {
      if (rep_[j].rows() != codomain_.block_extent(j) || rep_[j].cols() != domain_.block_extent(j)) {
        throw ShapeError("operator: block " + std::to_string(j) + " has wrong shape");
      }
    }
  }

  /// From the n x m entry matrix: entries[i][l] = T_{il}, i over the domain.
  static ModuleOperator from_entries(const ModuleSpace& domain, const ModuleSpace& codomain,
                                     const std::vector<std::vector<AlgebraElement>>& entries) {
    require_same(domain.descriptor, codomain.descriptor, "from_entries");
    if (entries.size() != static_cast<std::size_t>(domain.rank)) {
      throw ShapeError("entries: expected " + std::to_string(domain.rank) + " rows");
    }
    std::vector<CMatrix> rep;
    for (std::size_t j = 0; j < domain.num_blocks(); ++j) {
      rep.push_back(CMatrix::Zero(codomain.block_extent(j), domain.block_extent(j)));
    }
    for (int i = 0; i < domain.rank; ++i) {
      if (entries[i].size() != static_cast<std::size_t>(codomain.rank)) {
        throw ShapeError("entries: row " + std::to_string(i) + " has wrong length");
      }
      for (int l = 0; l < codomain.rank; ++l) {
        require_same(entries[i][l].descriptor(), domain.descriptor, "from_entries");
        for (std::size_t j = 0; j < domain.num_blocks(); ++j) {
          const int k = domain.descriptor.block_dim(j);
          rep[j].block(static_cast<Eigen::Index>(l) * k, static_cast<Eigen::Index>(i) * k, k, k) =
              entries[i][l].block(j).transpose();
        }
      }
    }
    return ModuleOperator(domain, codomain, std::move(rep));
  }

  static ModuleOperator zero(const ModuleSpace& domain, const ModuleSpace& codomain) {
    require_same(domain.descriptor, codomain.descriptor, "zero operator");
    std::vector<CMatrix> rep;
    for (std::size_t j = 0; j < domain.num_blocks(); ++j) {
      rep.push_back(CMatrix::Zero(codomain.block_extent(j), domain.block_extent(j)));
    }
    return ModuleOperator(domain, codomain, std::move(rep));
  }

  static ModuleOperator identity(const ModuleSpace& s) {
    std::vector<CMatrix> rep;
    for (std::size_t j = 0; j < s.num_blocks(); ++j) {
      rep.push_back(CMatrix::Identity(s.block_extent(j), s.block_extent(j)));
    }
    return ModuleOperator(s, s, std::move(rep));
  }

  const ModuleSpace& domain() const noexcept { return domain_; }
  const ModuleSpace& codomain() const noexcept { return codomain_; }
  const AlgebraDescriptor& descriptor() const noexcept { return domain_.descriptor; }
  std::size_t num_blocks() const noexcept { return rep_.size(); }
  const CMatrix& block(std::size_t j) const { return rep_.at(j); }
  const std::vector<CMatrix>& blocks() const noexcept { return rep_; }
  bool is_square() const { return domain_ == codomain_; }

  /// T_{il}: domain index i, codomain index l.
  AlgebraElement entry(int i, int l) const {
    if (i < 0 || i >= domain_.rank || l < 0 || l >= codomain_.rank) {
      throw ShapeError("entry index out of range");
    }
    std::vector<CMatrix> b;
    for (std::size_t j = 0; j < rep_.size(); ++j) {
      const int k = domain_.descriptor.block_dim(j);
      b.push_back(
          rep_[j].block(static_cast<Eigen::Index>(l) * k, static_cast<Eigen::Index>(i) * k, k, k)
              .transpose());
    }
    return AlgebraElement(domain_.descriptor, std::move(b));
  }

  std::vector<std::vector<AlgebraElement>> entries() const {
    std::vector<std::vector<AlgebraElement>> e(domain_.rank);
    for (int i = 0; i < domain_.rank; ++i) {
      for (int l = 0; l < codomain_.rank; ++l) e[i].push_back(entry(i, l));
    }
    return e;
  }

  ModuleVector apply(const ModuleVector& x) const {
    require_same(x.space(), domain_, "apply");
    std::vector<CMatrix> out;
    for (std::size_t j = 0; j < rep_.size(); ++j) out.push_back(rep_[j] * x.block(j));
    return ModuleVector::from_blocks(codomain_, out);
  }
  ModuleVector operator()(const ModuleVector& x) const { return apply(x); }

  ModuleOperator adjoint() const {
    std::vector<CMatrix> out;
    for (const auto& m : rep_) out.push_back(m.adjoint());
    return ModuleOperator(codomain_, domain_, std::move(out));
  }

  /// S * T is the composition S o T.
  friend ModuleOperator operator*(const ModuleOperator& s, const ModuleOperator& t) {
    require_same(t.codomain_, s.domain_, "compose");
    std::vector<CMatrix> out;
    for (std::size_t j = 0; j < s.rep_.size(); ++j) out.push_back(s.rep_[j] * t.rep_[j]);
    return ModuleOperator(t.domain_, s.codomain_, std::move(out));
  }
  friend ModuleOperator operator+(const ModuleOperator& a, const ModuleOperator& b) {
    require_same(a.domain_, b.domain_, "operator add");
    require_same(a.codomain_, b.codomain_, "operator add");
    std::vector<CMatrix> out;
    for (std::size_t j = 0; j < a.rep_.size(); ++j) out.push_back(a.rep_[j] + b.rep_[j]);
    return ModuleOperator(a.domain_, a.codomain_, std::move(out));
  }
  friend ModuleOperator operator-(const ModuleOperator& a, const ModuleOperator& b) {
    require_same(a.domain_, b.domain_, "operator sub");
    require_same(a.codomain_, b.codomain_, "operator sub");
    std::vector<CMatrix> out;
    for (std::size_t j = 0; j < a.rep_.size(); ++j) out.push_back(a.rep_[j] - b.rep_[j]);
    return ModuleOperator(a.domain_, a.codomain_, std::move(out));
  }
  friend ModuleOperator operator*(Complex c, const ModuleOperator& a) {
    std::vector<CMatrix> out;
    for (const auto& m : a.rep_) out.push_back(m * c);
    return ModuleOperator(a.domain_, a.codomain_, std::move(out));
  }

  friend bool operator==(const ModuleOperator& a, const ModuleOperator& b) {
    if (!(a.domain_ == b.domain_) || !(a.codomain_ == b.codomain_)) return false;
    for (std::size_t j = 0; j < a.rep_.size(); ++j) {
      if (a.rep_[j] != b.rep_[j]) return false;
    }
    return true;
  }

 private:
  ModuleSpace domain_;
  ModuleSpace codomain_;
  std::vector<CMatrix> rep_;
};

inline ModuleOperator compose(const ModuleOperator& s, const ModuleOperator& t) { return s * t; }

/// Block-diagonal complex matrix collecting every block of the scalar representation.
inline CMatrix scalar_representation(const ModuleOperator& t) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& m : t.blocks()) {
    rows += m.rows();
    cols += m.cols();
  }
  CMatrix out = CMatrix::Zero(rows, cols);
  Eigen::Index r = 0, c = 0;
  for (const auto& m : t.blocks()) {
    out.block(r, c, m.rows(), m.cols()) = m;
    r += m.rows();
    c += m.cols();
  }
  return out;
}

/// Inverse of scalar_representation; rejects any nonzero entry off the block diagonal.
inline ModuleOperator from_scalar(const ModuleSpace& domain, const ModuleSpace& codomain,
                                  const CMatrix& m) {
  require_same(domain.descriptor, codomain.descriptor, "from_scalar");
  Eigen::Index rows = 0, cols = 0;
  for (std::size_t j = 0; j < domain.num_blocks(); ++j) {
    rows += codomain.block_extent(j);
    cols += domain.block_extent(j);
  }
  if (m.rows() != rows || m.cols() != cols) throw ShapeError("from_scalar: wrong matrix size");
  std::vector<CMatrix> rep;
  Eigen::Index r = 0, c = 0;
  for (std::size_t j = 0; j < domain.num_blocks(); ++j) {
    const Eigen::Index br = codomain.block_extent(j), bc = domain.block_extent(j);
    rep.push_back(m.block(r, c, br, bc));
    r += br;
    c += bc;
  }
  if ((m - scalar_representation(ModuleOperator(domain, codomain, rep))).cwiseAbs().maxCoeff() !=
      0.0) {
    throw ShapeError("from_scalar: matrix does not respect the block structure");
  }
  return ModuleOperator(domain, codomain, std::move(rep));
}

inline OperatorNorms operator_norms(const ModuleOperator& t) {
  OperatorNorms n;
  for (const auto& m : t.blocks()) {
    n.per_seminorm.push_back(linalg::spectral_norm(m));
    n.uniform = std::max(n.uniform, n.per_seminorm.back());
  }
  return n;
}

/// ||T||_inf, the largest per-seminorm operator norm.
inline double uniform_norm(const ModuleOperator& t) { return operator_norms(t).uniform; }

inline bool operator_positivity(const ModuleOperator& t, double tol = default_tolerance()) {
  if (!t.is_square()) throw ShapeError("operator_positivity: operator is not square");
  for (const auto& m : t.blocks()) {
    const double norm = linalg::spectral_norm(m);
    if (linalg::spectral_norm(m - m.adjoint()) > tol * (1.0 + norm)) return false;
    if (linalg::min_eigenvalue(m) < -tol * (1.0 + norm)) return false;
  }
  return true;
}

inline bool is_self_adjoint(const ModuleOperator& t, double tol = default_tolerance()) {
  if (!t.is_square()) return false;
  for (const auto& m : t.blocks()) {
    if (linalg::spectral_norm(m - m.adjoint()) > tol * (1.0 + linalg::spectral_norm(m))) return false;
  }
  return true;
}

/// Functional calculus of a self-adjoint operator.
inline ModuleOperator operator_function(const ModuleOperator& t,
                                        const std::function<double(double)>& f,
                                        double tol = default_tolerance()) {
  if (!is_self_adjoint(t, tol)) throw DomainError("operator_function: operator is not self-adjoint");
  std::vector<CMatrix> out;
  for (const auto& m : t.blocks()) out.push_back(linalg::hermitian_function(m, f));
  return ModuleOperator(t.domain(), t.codomain(), std::move(out));
}

/// Positive square root of a positive operator.
inline ModuleOperator operator_sqrt(const ModuleOperator& t, double tol = default_tolerance()) {
  if (!is_self_adjoint(t, tol)) throw DomainError("operator_sqrt: operator is not self-adjoint");
  std::vector<CMatrix> out;
  for (const auto& m : t.blocks()) out.push_back(linalg::psd_sqrt(m));
  return ModuleOperator(t.domain(), t.codomain(), std::move(out));
}

inline ModuleOperator power(const ModuleOperator& t, int n) {
  if (!t.is_square()) throw ShapeError("power: operator is not square");
  if (n < 0) throw DomainError("power: negative exponent");
  ModuleOperator out = ModuleOperator::identity(t.domain());
  for (int i = 0; i < n; ++i) out = out * t;
  return out;
}

/// Numerically invertible: square with full numerical rank at every block.
inline bool is_invertible(const ModuleOperator& t) {
  if (!t.is_square()) return false;
  for (const auto& m : t.blocks()) {
    if (linalg::numerical_rank(m) != m.rows()) return false;
  }
  return true;
}

/// Full numerical row rank at every block (surjective / dense range).
inline bool has_full_range(const ModuleOperator& t) {
  for (const auto& m : t.blocks()) {
    if (linalg::numerical_rank(m) != m.rows()) return false;
  }
  return true;
}

/// [A B]: operators with a common codomain, acting on the direct sum of their domains.
inline ModuleOperator hstack(const ModuleOperator& a, const ModuleOperator& b) {
  require_same(a.codomain(), b.codomain(), "hstack");
  std::vector<CMatrix> out;
  for (std::size_t j = 0; j < a.num_blocks(); ++j) {
    CMatrix m(a.block(j).rows(), a.block(j).cols() + b.block(j).cols());
    m << a.block(j), b.block(j);
    out.push_back(std::move(m));
  }
  return ModuleOperator(direct_sum(a.domain(), b.domain()), a.codomain(), std::move(out));
}

/// [A; B]: operators with a common domain, into the direct sum of their codomains.
inline ModuleOperator vstack(const ModuleOperator& a, const ModuleOperator& b) {
  require_same(a.domain(), b.domain(), "vstack");
  std::vector<CMatrix> out;
  for (std::size_t j = 0; j < a.num_blocks(); ++j) {
    CMatrix m(a.block(j).rows() + b.block(j).rows(), a.block(j).cols());
    m << a.block(j), b.block(j);
    out.push_back(std::move(m));
  }
  return ModuleOperator(a.domain(), direct_sum(a.codomain(), b.codomain()), std::move(out));
}

/// Compression of T to domain coordinates [dom_first, dom_first + dom_rank)
/// and codomain coordinates [cod_first, cod_first + cod_rank).
inline ModuleOperator sub_operator(const ModuleOperator& t, int dom_first, int dom_rank,
                                   int cod_first, int cod_rank) {
  if (dom_first < 0 || dom_rank < 1 || dom_first + dom_rank > t.domain().rank || cod_first < 0 ||
      cod_rank < 1 || cod_first + cod_rank > t.codomain().rank) {
    throw ShapeError("sub_operator: coordinate range out of bounds");
  }
  const ModuleSpace dom(t.descriptor(), dom_rank), cod(t.descriptor(), cod_rank);
  std::vector<CMatrix> out;
  for (std::size_t j = 0; j < t.num_blocks(); ++j) {
    const int k = t.descriptor().block_dim(j);
    out.push_back(t.block(j).block(static_cast<Eigen::Index>(cod_first) * k,
                                   static_cast<Eigen::Index>(dom_first) * k,
                                   static_cast<Eigen::Index>(cod_rank) * k,
                                   static_cast<Eigen::Index>(dom_rank) * k));
  }
  return ModuleOperator(dom, cod, std::move(out));
}

}  // namespace hmod
