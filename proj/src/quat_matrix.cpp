#include "qma/quat_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qma/errors.hpp"

namespace qma {

std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
  return os << '(' << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ')';
}

QuatMatrix::QuatMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

QuatMatrix QuatMatrix::identity(std::size_t n) {
  QuatMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Quaternion(1.0);
  return m;
}

QuatMatrix QuatMatrix::diagonal(std::span<const double> d) {
  QuatMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = Quaternion(d[i]);
  return m;
}

QuatMatrix QuatMatrix::from_realization(const Eigen::MatrixXd& r) {
  if (r.rows() % 4 != 0 || r.cols() % 4 != 0) {
    throw DimensionError("realization dimensions must be multiples of 4");
  }
  QuatMatrix m(static_cast<std::size_t>(r.rows() / 4), static_cast<std::size_t>(r.cols() / 4));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const auto ri = static_cast<Eigen::Index>(4 * i);
      const auto cj = static_cast<Eigen::Index>(4 * j);
      m(i, j) = Quaternion(r(ri, cj), r(ri + 1, cj), r(ri + 2, cj), r(ri + 3, cj));
    }
  }
  return m;
}

QuatMatrix QuatMatrix::adjoint() const {
  QuatMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j).conj();
  return m;
}

QuatMatrix QuatMatrix::column(std::size_t j) const {
  QuatMatrix m(rows_, 1);
  for (std::size_t i = 0; i < rows_; ++i) m(i, 0) = (*this)(i, j);
  return m;
}

double QuatMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i).w;
  return t;
}

double QuatMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& q : data_) m = std::max(m, qma::max_abs(q));
  return m;
}

QuatMatrix& QuatMatrix::operator+=(const QuatMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix sum: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

QuatMatrix& QuatMatrix::operator-=(const QuatMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix difference: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

QuatMatrix& QuatMatrix::operator*=(double s) {
  for (auto& q : data_) q *= s;
  return *this;
}

QuatMatrix operator+(QuatMatrix a, const QuatMatrix& b) { return a += b; }
QuatMatrix operator-(QuatMatrix a, const QuatMatrix& b) { return a -= b; }
QuatMatrix operator*(QuatMatrix a, double s) { return a *= s; }
QuatMatrix operator*(double s, QuatMatrix a) { return a *= s; }

QuatMatrix operator*(const QuatMatrix& a, const QuatMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product: inner dimensions differ");
  QuatMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Quaternion aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

QuatMatrix operator*(const QuatMatrix& a, const Quaternion& q) {
  QuatMatrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) * q;
  return c;
}

Eigen::MatrixXd realize(const QuatMatrix& a) {
  if (!a.square()) throw DimensionError("realize: matrix not square");
  const auto rows = static_cast<Eigen::Index>(4 * a.rows());
  const auto cols = static_cast<Eigen::Index>(4 * a.cols());
  Eigen::MatrixXd r(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Quaternion& q = a(i, j);
      // Left multiplication by q in the basis (1, i, j, k).
      const double block[4][4] = {{q.w, -q.x, -q.y, -q.z},
                                  {q.x, q.w, -q.z, q.y},
                                  {q.y, q.z, q.w, -q.x},
                                  {q.z, -q.y, q.x, q.w}};
      for (int rr = 0; rr < 4; ++rr)
        for (int p = 0; p < 4; ++p)
          r(static_cast<Eigen::Index>(4 * i) + rr, static_cast<Eigen::Index>(4 * j) + p) =
              block[rr][p];
    }
  return r;
}

QuatMatrix congruence(const QuatMatrix& a, const QuatMatrix& c) {
  if (!a.square() || a.rows() != c.rows()) throw DimensionError("congruence: dimension mismatch");
  return c.adjoint() * a * c;
}

QuatMatrix inverse(const QuatMatrix& a) {
  if (!a.square()) throw DimensionError("inverse: matrix not square");
  const Eigen::MatrixXd r = realize(a);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(r);
  if (!lu.isInvertible()) throw SingularMatrix("inverse: matrix is singular");
  return QuatMatrix::from_realization(lu.inverse());
}

double max_abs_diff(const QuatMatrix& a, const QuatMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, max_abs(a(i, j) - b(i, j)));
  return m;
}

Quaternion inner(const QuatMatrix& u, const QuatMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != 1 || v.cols() != 1)
    throw DimensionError("inner: expected column vectors of equal length");
  Quaternion s;
  for (std::size_t i = 0; i < u.rows(); ++i) s += u(i, 0).conj() * v(i, 0);
  return s;
}

}  // namespace qma
