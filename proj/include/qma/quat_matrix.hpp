#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qma/quaternion.hpp"

namespace qma {

/// Dense quaternionic matrix, row-major. Acts on column vectors of H^n from
/// the left; scalars act on vectors from the right.
class QuatMatrix {
 public:
  QuatMatrix() = default;
  QuatMatrix(std::size_t rows, std::size_t cols);

  static QuatMatrix identity(std::size_t n);
  static QuatMatrix diagonal(std::span<const double> d);
  /// Inverse of realize(): reads block (i,j) column 0 as a_ij.
  static QuatMatrix from_realization(const Eigen::MatrixXd& r);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Quaternion& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Quaternion& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  QuatMatrix adjoint() const;
  /// Column j as an n x 1 matrix.
  QuatMatrix column(std::size_t j) const;
  /// Real part of the trace.
  double trace() const;
  double max_abs() const;

  QuatMatrix& operator+=(const QuatMatrix& o);
  QuatMatrix& operator-=(const QuatMatrix& o);
  QuatMatrix& operator*=(double s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Quaternion> data_;
};

QuatMatrix operator+(QuatMatrix a, const QuatMatrix& b);
QuatMatrix operator-(QuatMatrix a, const QuatMatrix& b);
QuatMatrix operator*(QuatMatrix a, double s);
QuatMatrix operator*(double s, QuatMatrix a);
QuatMatrix operator*(const QuatMatrix& a, const QuatMatrix& b);
/// Right scalar multiplication A * q (every entry a_ij * q).
QuatMatrix operator*(const QuatMatrix& a, const Quaternion& q);

/// Real 4n x 4n matrix of x -> A x on R^{4n} = H^n; row 4i+r, column 4j+p
/// holds component r of a_ij * e_p. Throws DimensionError unless A is square.
Eigen::MatrixXd realize(const QuatMatrix& a);

/// C* A C.
QuatMatrix congruence(const QuatMatrix& a, const QuatMatrix& c);

/// Inverse through the realization. Throws SingularMatrix.
QuatMatrix inverse(const QuatMatrix& a);

/// max_ij |a_ij - b_ij| over quaternion components.
double max_abs_diff(const QuatMatrix& a, const QuatMatrix& b);

/// Quaternionic inner product <u, v> = u* v for n x 1 column matrices.
Quaternion inner(const QuatMatrix& u, const QuatMatrix& v);

}  // namespace qma
