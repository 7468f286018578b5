#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmod {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/// Operands live over different algebras or have incompatible ranks.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside an operation's mathematical domain (non-self-adjoint where
/// self-adjointness is required, non-Parseval frame, singular operator, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A factorization or transfer was requested whose range hypothesis fails.
class UnsolvableError : public std::runtime_error {
 public:
  UnsolvableError(const std::string& what, std::ptrdiff_t column)
      : std::runtime_error(what), column_(column) {}

  /// Column of the scalar representation that left the range, or -1.
  std::ptrdiff_t column() const noexcept { return column_; }

 private:
  std::ptrdiff_t column_;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kBuiltinTolerance = 1e-9;

/// Relative singular-value cutoff: sigma <= kRankCutoff * max(rows, cols) * sigma_max is zero.
inline constexpr double kRankCutoff = 1e-10;

/// Default tolerance; MF_DEFAULT_TOL overrides it when set to a positive number.
inline double default_tolerance() {
  if (const char* env = std::getenv("MF_DEFAULT_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && std::isfinite(v) && v > 0.0) return v;
  }
  return kBuiltinTolerance;
}

namespace linalg {

inline CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) * 0.5; }

inline double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

/// Eigen-decomposition of the Hermitian part of `m`; eigenvalues ascending.
struct Eigh {
  RVector values;
  CMatrix vectors;
};

inline Eigh eigh(const CMatrix& m) {
  if (m.rows() == 0) return {RVector(0), CMatrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline double min_eigenvalue(const CMatrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  return es.eigenvalues()(0);
}

inline double max_eigenvalue(const CMatrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

/// Thin SVD truncated at the numerical rank.
struct TruncatedSvd {
  CMatrix u;       // rows x r
  RVector sigma;   // r
  CMatrix v;       // cols x r
  Eigen::Index rank() const { return sigma.size(); }
};

inline double rank_threshold(const RVector& sigma, Eigen::Index rows, Eigen::Index cols) {
  if (sigma.size() == 0) return 0.0;
  return kRankCutoff * static_cast<double>(std::max(rows, cols)) * sigma(0);
}

inline TruncatedSvd truncated_svd(const CMatrix& m) {
  if (m.size() == 0) {
    return {CMatrix(m.rows(), 0), RVector(0), CMatrix(m.cols(), 0)};
  }
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const double cut = rank_threshold(s, m.rows(), m.cols());
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return {svd.matrixU().leftCols(r), s.head(r), svd.matrixV().leftCols(r)};
}

inline Eigen::Index numerical_rank(const CMatrix& m) { return truncated_svd(m).rank(); }

inline CMatrix pinv(const CMatrix& m) {
  const TruncatedSvd t = truncated_svd(m);
  CMatrix out = CMatrix::Zero(m.cols(), m.rows());
  if (t.rank() == 0) return out;
  out = t.v * t.sigma.cwiseInverse().asDiagonal() * t.u.adjoint();
  return out;
}

/// Orthonormal basis of the column space.
inline CMatrix range_basis(const CMatrix& m) { return truncated_svd(m).u; }

inline CMatrix range_projector(const CMatrix& m) {
  const CMatrix u = range_basis(m);
  return u * u.adjoint();
}

/// Apply a real function to the spectrum of the Hermitian part of `m`.
template <class F>
CMatrix hermitian_function(const CMatrix& m, F&& f) {
  if (m.rows() == 0) return m;
  const Eigh e = eigh(m);
  RVector fv(e.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(e.values(i));
  return hermitian_part(e.vectors * fv.cast<Complex>().asDiagonal() * e.vectors.adjoint());
}

/// Positive square root of a PSD matrix. Eigenvalues at the roundoff floor
/// 64 n eps lambda_max are zeroed first; their roots would otherwise sit far
/// above the rank cutoff.
inline CMatrix psd_sqrt(const CMatrix& m) {
  if (m.rows() == 0) return m;
  const Eigh e = eigh(m);
  const double top = std::max(e.values.maxCoeff(), 0.0);
  const double floor = 64.0 * static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon() * top;
  RVector root(e.values.size());
  for (Eigen::Index i = 0; i < root.size(); ++i) root(i) = e.values(i) > floor ? std::sqrt(e.values(i)) : 0.0;
  return hermitian_part(e.vectors * root.cast<Complex>().asDiagonal() * e.vectors.adjoint());
}

}  // namespace linalg
}  // namespace hmod
