#include "qma/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qma/errors.hpp"

namespace qma {

Grid::Grid(std::size_t n, std::vector<int> sizes, std::vector<double> periods)
    : n_(n), sizes_(std::move(sizes)), periods_(std::move(periods)) {
  if (n_ == 0) throw DimensionError("grid: quaternionic dimension must be >= 1");
  if (sizes_.size() != 4 * n_ || periods_.size() != 4 * n_) {
    throw DimensionError("grid: need 4n sizes and 4n periods");
  }
  strides_.assign(4 * n_, 1);
  points_ = 1;
  for (std::size_t s = 4 * n_; s-- > 0;) {
    if (sizes_[s] < 1) throw DimensionError("grid: axis sizes must be positive");
    if (!(periods_[s] > 0.0)) throw DimensionError("grid: periods must be positive");
    strides_[s] = points_;
    points_ *= static_cast<std::size_t>(sizes_[s]);
  }
  for (std::size_t s = 0; s < 4 * n_; ++s)
    if (sizes_[s] > 1) active_.push_back(s);
}

Grid::Grid(std::size_t n, std::vector<int> sizes)
    : Grid(n, std::move(sizes), std::vector<double>(4 * n, 1.0)) {}

double Grid::volume() const {
  double v = 1.0;
  for (double l : periods_) v *= l;
  return v;
}

void Grid::coords(std::size_t point, std::span<double> x) const {
  for (std::size_t s = 0; s < dim(); ++s) x[s] = coord_index(point, s) * spacing(s);
}

std::vector<double> Grid::coords(std::size_t point) const {
  std::vector<double> x(dim());
  coords(point, x);
  return x;
}

std::size_t Grid::shift(std::size_t point, std::size_t axis, int offset) const {
  const int n = sizes_[axis];
  const int i = coord_index(point, axis);
  int j = (i + offset) % n;
  if (j < 0) j += n;
  return point + static_cast<std::size_t>(j) * strides_[axis] -
         static_cast<std::size_t>(i) * strides_[axis];
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw DimensionError(std::string(what) + ": grid mismatch");
}

// ---------------------------------------------------------------- ScalarField

ScalarField::ScalarField(Grid g, double value)
    : grid_(std::move(g)), values_(grid_.points(), value) {}

ScalarField::ScalarField(Grid g, std::vector<double> values)
    : grid_(std::move(g)), values_(std::move(values)) {
  if (values_.size() != grid_.points()) throw DimensionError("scalar field: wrong value count");
}

void ScalarField::require_finite(const char* what) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw PointError(std::string(what) + ": non-finite value", i);
  }
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "field sum");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "field difference");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

ScalarField& ScalarField::operator+=(double s) {
  for (auto& v : values_) v += s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

// ------------------------------------------------------------- HermitianField

HermitianField::HermitianField(Grid g)
    : grid_(std::move(g)),
      stride_(grid_.n() + 2 * grid_.n() * (grid_.n() - 1)),
      data_(grid_.points() * stride_, 0.0) {}

HermitianField::HermitianField(Grid g, const HyperHermitian& value) : HermitianField(std::move(g)) {
  if (value.n() != grid_.n()) throw DimensionError("hermitian field: value size mismatch");
  for (std::size_t p = 0; p < grid_.points(); ++p) set(p, value);
}

HyperHermitian HermitianField::at(std::size_t point) const {
  const std::size_t n = grid_.n();
  const double* r = data_.data() + point * stride_;
  std::vector<double> d(r, r + n);
  std::vector<Quaternion> u(n * (n - 1) / 2);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double* q = r + n + 4 * k;
    u[k] = Quaternion(q[0], q[1], q[2], q[3]);
  }
  return HyperHermitian(std::move(d), std::move(u));
}

void HermitianField::set(std::size_t point, const HyperHermitian& h) {
  const std::size_t n = grid_.n();
  if (h.n() != n) throw DimensionError("hermitian field: value size mismatch");
  double* r = data_.data() + point * stride_;
  for (std::size_t i = 0; i < n; ++i) r[i] = h.diag()[i];
  for (std::size_t k = 0; k < h.upper().size(); ++k) {
    const Quaternion& q = h.upper()[k];
    r[n + 4 * k] = q.w;
    r[n + 4 * k + 1] = q.x;
    r[n + 4 * k + 2] = q.y;
    r[n + 4 * k + 3] = q.z;
  }
}

ScalarField HermitianField::component(std::size_t c) const {
  ScalarField f(grid_);
  for (std::size_t p = 0; p < grid_.points(); ++p) f[p] = data_[p * stride_ + c];
  return f;
}

void HermitianField::set_component(std::size_t c, const ScalarField& f) {
  require_same_grid(grid_, f.grid(), "hermitian field component");
  for (std::size_t p = 0; p < grid_.points(); ++p) data_[p * stride_ + c] = f[p];
}

HermitianField& HermitianField::operator+=(const HermitianField& o) {
  require_same_grid(grid_, o.grid_, "hermitian field sum");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

HermitianField& HermitianField::operator-=(const HermitianField& o) {
  require_same_grid(grid_, o.grid_, "hermitian field difference");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

HermitianField& HermitianField::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

HermitianField operator+(HermitianField a, const HermitianField& b) { return a += b; }
HermitianField operator-(HermitianField a, const HermitianField& b) { return a -= b; }

// --------------------------------------------------------------- RealSymField

RealSymField::RealSymField(Grid g)
    : grid_(std::move(g)),
      dim_(grid_.dim()),
      stride_(dim_ * (dim_ + 1) / 2),
      data_(grid_.points() * stride_, 0.0) {}

void RealSymField::set(std::size_t point, const Eigen::MatrixXd& m) {
  double* r = data_.data() + point * stride_;
  for (std::size_t s = 0; s < dim_; ++s)
    for (std::size_t t = s; t < dim_; ++t)
      r[index(s, t)] = m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t));
}

Eigen::MatrixXd RealSymField::at(std::size_t point) const {
  const auto m = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd out(m, m);
  for (std::size_t s = 0; s < dim_; ++s)
    for (std::size_t t = 0; t < dim_; ++t)
      out(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = (*this)(point, s, t);
  return out;
}

ScalarField RealSymField::entry(std::size_t s, std::size_t t) const {
  ScalarField f(grid_);
  const std::size_t k = index(s, t);
  for (std::size_t p = 0; p < grid_.points(); ++p) f[p] = data_[p * stride_ + k];
  return f;
}

double RealSymField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace qma
