#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qma/hherm.hpp"

namespace qma {

/// Uniform periodic grid on R^{4n} / (L_0 Z x ... x L_{4n-1} Z).
/// Axis s = 4 i + p carries real coordinate p of the quaternion q_{i+1}.
/// Points are stored row-major with axis 0 slowest.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t n, std::vector<int> sizes, std::vector<double> periods);
  /// All periods 1.
  Grid(std::size_t n, std::vector<int> sizes);

  std::size_t n() const { return n_; }
  std::size_t dim() const { return 4 * n_; }
  std::size_t points() const { return points_; }
  std::span<const int> sizes() const { return sizes_; }
  std::span<const double> periods() const { return periods_; }
  int size(std::size_t axis) const { return sizes_[axis]; }
  double period(std::size_t axis) const { return periods_[axis]; }
  double spacing(std::size_t axis) const { return periods_[axis] / sizes_[axis]; }
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }
  bool frozen(std::size_t axis) const { return sizes_[axis] == 1; }
  /// Non-frozen axes in increasing order.
  std::span<const std::size_t> active_axes() const { return active_; }
  double volume() const;

  /// Index of the point along one axis.
  int coord_index(std::size_t point, std::size_t axis) const {
    return static_cast<int>((point / strides_[axis]) % static_cast<std::size_t>(sizes_[axis]));
  }
  /// Real coordinates of a point.
  void coords(std::size_t point, std::span<double> x) const;
  std::vector<double> coords(std::size_t point) const;
  /// Neighbor along an axis with periodic wrap.
  std::size_t shift(std::size_t point, std::size_t axis, int offset) const;

  bool operator==(const Grid& o) const {
    return n_ == o.n_ && sizes_ == o.sizes_ && periods_ == o.periods_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<int> sizes_;
  std::vector<double> periods_;
  std::vector<std::size_t> strides_;
  std::vector<std::size_t> active_;
  std::size_t points_ = 0;
};

/// Throws DimensionError unless the grids agree.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

/// One real value per grid point.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(Grid g, double value = 0.0);
  ScalarField(Grid g, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  /// Throws Error if any value is NaN or infinite.
  void require_finite(const char* what) const;

  double max_abs() const;
  double min() const;
  double max() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);
  ScalarField& operator+=(double s);

 private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, double s);
ScalarField operator*(double s, ScalarField a);

/// Per-point hyperhermitian values, stored interleaved: n diagonal reals,
/// then (w, x, y, z) of each upper entry (i<j) in lexicographic order.
class HermitianField {
 public:
  HermitianField() = default;
  explicit HermitianField(Grid g);
  /// Same value at every point.
  HermitianField(Grid g, const HyperHermitian& value);

  const Grid& grid() const { return grid_; }
  std::size_t n() const { return grid_.n(); }
  std::size_t stride() const { return stride_; }
  std::size_t points() const { return grid_.points(); }
  std::span<const double> raw() const { return data_; }
  std::span<double> raw() { return data_; }

  HyperHermitian at(std::size_t point) const;
  void set(std::size_t point, const HyperHermitian& h);
  /// Real component c of the per-point record as a scalar field.
  ScalarField component(std::size_t c) const;
  void set_component(std::size_t c, const ScalarField& f);

  HermitianField& operator+=(const HermitianField& o);
  HermitianField& operator-=(const HermitianField& o);
  HermitianField& operator*=(double s);

 private:
  Grid grid_;
  std::size_t stride_ = 0;
  std::vector<double> data_;
};

HermitianField operator+(HermitianField a, const HermitianField& b);
HermitianField operator-(HermitianField a, const HermitianField& b);

/// Per-point real symmetric m x m matrices (m = 4n), upper triangle stored
/// row by row.
class RealSymField {
 public:
  RealSymField() = default;
  explicit RealSymField(Grid g);

  const Grid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  std::size_t stride() const { return stride_; }

  double operator()(std::size_t point, std::size_t s, std::size_t t) const {
    return data_[point * stride_ + index(s, t)];
  }
  void set(std::size_t point, const Eigen::MatrixXd& m);
  Eigen::MatrixXd at(std::size_t point) const;
  /// Entry (s, t) as a scalar field.
  ScalarField entry(std::size_t s, std::size_t t) const;
  double max_abs() const;

  std::size_t index(std::size_t s, std::size_t t) const {
    if (s > t) std::swap(s, t);
    return s * dim_ - s * (s + 1) / 2 + t;
  }

 private:
  Grid grid_;
  std::size_t dim_ = 0;
  std::size_t stride_ = 0;
  std::vector<double> data_;
};

}  // namespace qma
