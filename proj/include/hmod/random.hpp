#pragma once

// Seeded sampling of algebra elements, vectors and operators. Built on the raw
// output of std::mt19937_64 (whose sequence is fixed by the standard) instead of
// the <random> distributions, whose algorithms are implementation-defined, so
// that a seed yields bit-identical instances on every standard library.

#include "hmod/module.hpp"

#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace hmod {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Stable seed derivation for (base seed, label, index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t index) {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return splitmix64(splitmix64(seed ^ h) + index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

  bool coin() { return (engine_() >> 63) != 0; }

  /// Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  /// Complex Gaussian with E|z|^2 = 1.
  Complex complex_normal() { return Complex(normal(), normal()) * std::sqrt(0.5); }

  CMatrix gaussian(Eigen::Index rows, Eigen::Index cols) {
    CMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = complex_normal();
    }
    return m;
  }

  /// Haar-distributed unitary via QR of a Gaussian matrix with phase fix.
  CMatrix unitary(Eigen::Index n) {
    const CMatrix g = gaussian(n, n);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(r(i, i));
      if (a > 0.0) q.col(i) *= r(i, i) / a;
    }
    return q;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline AlgebraElement random_element(Rng& rng, const AlgebraDescriptor& d) {
  std::vector<CMatrix> b;
  for (int k : d.block_dims()) b.push_back(rng.gaussian(k, k));
  return AlgebraElement(d, std::move(b));
}

inline AlgebraElement random_positive_element(Rng& rng, const AlgebraDescriptor& d) {
  std::vector<CMatrix> b;
  for (int k : d.block_dims()) {
    const CMatrix g = rng.gaussian(k, k);
    b.push_back(linalg::hermitian_part(g * g.adjoint()));
  }
  return AlgebraElement(d, std::move(b));
}

inline AlgebraElement random_self_adjoint_element(Rng& rng, const AlgebraDescriptor& d) {
  std::vector<CMatrix> b;
  for (int k : d.block_dims()) b.push_back(linalg::hermitian_part(rng.gaussian(k, k)));
  return AlgebraElement(d, std::move(b));
}

inline ModuleVector random_vector(Rng& rng, const ModuleSpace& s) {
  std::vector<AlgebraElement> c;
  for (int i = 0; i < s.rank; ++i) c.push_back(random_element(rng, s.descriptor));
  return ModuleVector(s, std::move(c));
}

inline ModuleOperator random_operator(Rng& rng, const ModuleSpace& domain,
                                      const ModuleSpace& codomain) {
  std::vector<CMatrix> rep;
  for (std::size_t j = 0; j < domain.num_blocks(); ++j) {
    rep.push_back(rng.gaussian(codomain.block_extent(j), domain.block_extent(j)));
  }
  return ModuleOperator(domain, codomain, std::move(rep));
}

}  // namespace hmod
