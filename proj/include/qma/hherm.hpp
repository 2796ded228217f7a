#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qma/quat_matrix.hpp"

namespace qma {

/// Quaternionic matrix with a_ij = conj(a_ji), stored as its real diagonal
/// and the strict upper triangle in lexicographic (i<j) order.
class HyperHermitian {
 public:
  HyperHermitian() = default;
  explicit HyperHermitian(std::size_t n);
  HyperHermitian(std::vector<double> diagonal, std::vector<Quaternion> upper);

  static HyperHermitian identity(std::size_t n, double scale = 1.0);
  static HyperHermitian diagonal(std::span<const double> d);
  /// Symmetrizes (A + A*)/2; rejects inputs farther than tol * (1 + |A|) from
  /// hyperhermitian.
  static HyperHermitian from_matrix(const QuatMatrix& a, double tol = 1e-9);

  std::size_t n() const { return n_; }
  std::span<const double> diag() const { return diag_; }
  std::span<const Quaternion> upper() const { return upper_; }

  /// Entry (i, j) for any i, j.
  Quaternion operator()(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, const Quaternion& q);

  QuatMatrix to_matrix() const;
  double trace() const;
  double max_abs() const;

  HyperHermitian& operator+=(const HyperHermitian& o);
  HyperHermitian& operator-=(const HyperHermitian& o);
  HyperHermitian& operator*=(double s);

  static std::size_t upper_index(std::size_t i, std::size_t j, std::size_t n) {
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> diag_;
  std::vector<Quaternion> upper_;
};

HyperHermitian operator+(HyperHermitian a, const HyperHermitian& b);
HyperHermitian operator-(HyperHermitian a, const HyperHermitian& b);
HyperHermitian operator*(HyperHermitian a, double s);
HyperHermitian operator*(double s, HyperHermitian a);

/// Real symmetric 4n x 4n realization.
Eigen::MatrixXd realize(const HyperHermitian& a);

/// C* A C, again hyperhermitian.
HyperHermitian congruence(const HyperHermitian& a, const QuatMatrix& c);

struct EigenDecomposition {
  /// One representative per quadruple of realization eigenvalues, ascending.
  std::vector<double> eigenvalues;
  /// Columns are quaternionically orthonormal eigenvectors: A xi = xi lambda.
  QuatMatrix eigenvectors;

  double min_eigenvalue() const { return eigenvalues.front(); }
  double max_eigenvalue() const { return eigenvalues.back(); }
};

EigenDecomposition eig(const HyperHermitian& a);

/// Smallest eigenvalue; closed form for n <= 2.
double min_eig(const HyperHermitian& a);

/// Moore determinant through the realization spectrum (signed).
double moore_det(const HyperHermitian& a);
/// Same value; closed forms for n = 1 and n = 2, general route otherwise.
double moore_det_fast(const HyperHermitian& a);

/// Polarized Moore determinant det(A_1, ..., A_n).
double mixed_det(std::span<const HyperHermitian> args);

/// Upper-triangular T with real positive diagonal and A = T* T.
QuatMatrix cholesky(const HyperHermitian& a);

struct SimultaneousDiagonalization {
  QuatMatrix t;
  std::vector<double> d;
};

/// A = T* T and B = T* diag(d) T for positive A.
SimultaneousDiagonalization simdiag(const HyperHermitian& a, const HyperHermitian& b);

struct RankOneDecomposition {
  std::vector<QuatMatrix> vectors;  ///< unit n x 1 columns zeta_k
  std::vector<double> weights;      ///< beta_k
  double lambda_star = 0.0;
  double Lambda_star = 0.0;

  HyperHermitian reconstruct() const;
};

/// A = sum_k beta_k zeta_k zeta_k* from the eigendecomposition, for A with
/// spectrum inside [lambda, Lambda]. Zero-weight terms are dropped.
RankOneDecomposition rank_one_decomp(const HyperHermitian& a, double lambda, double Lambda);

/// Inverse of a hyperhermitian matrix (closed form for n <= 2).
HyperHermitian inverse(const HyperHermitian& a);

/// Real part of Tr(A B).
double trace_product(const HyperHermitian& a, const HyperHermitian& b);

}  // namespace qma
