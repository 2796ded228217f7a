#pragma once

#include <array>
#include <cmath>
#include <iosfwd>

namespace qma {

/// Real quaternion w + x i + y j + z k with ij = k, jk = i, ki = j.
struct Quaternion {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_, double x_ = 0.0, double y_ = 0.0, double z_ = 0.0)
      : w(w_), x(x_), y(y_), z(z_) {}

  /// Unit e_p for p = 0..3 (1, i, j, k).
  static constexpr Quaternion unit(int p) {
    switch (p) {
      case 0: return {1, 0, 0, 0};
      case 1: return {0, 1, 0, 0};
      case 2: return {0, 0, 1, 0};
      default: return {0, 0, 0, 1};
    }
  }

  constexpr double operator[](int p) const {
    return p == 0 ? w : p == 1 ? x : p == 2 ? y : z;
  }
  constexpr double& operator[](int p) {
    return p == 0 ? w : p == 1 ? x : p == 2 ? y : z;
  }

  constexpr Quaternion conj() const { return {w, -x, -y, -z}; }
  constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  constexpr double real() const { return w; }
  constexpr bool is_real() const { return x == 0.0 && y == 0.0 && z == 0.0; }

  Quaternion inverse() const {
    const double n2 = norm2();
    return {w / n2, -x / n2, -y / n2, -z / n2};
  }

  constexpr Quaternion& operator+=(const Quaternion& o) {
    w += o.w; x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    w -= o.w; x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Quaternion& operator*=(double s) {
    w *= s; x *= s; y *= s; z *= s;
    return *this;
  }
};

constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
constexpr Quaternion operator*(Quaternion a, double s) { return a *= s; }
constexpr Quaternion operator*(double s, Quaternion a) { return a *= s; }

constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr bool operator==(const Quaternion& a, const Quaternion& b) {
  return a.w == b.w && a.x == b.x && a.y == b.y && a.z == b.z;
}

inline Quaternion quat_mul(const Quaternion& a, const Quaternion& b) { return a * b; }

/// Largest absolute component.
inline double max_abs(const Quaternion& q) {
  return std::fmax(std::fmax(std::fabs(q.w), std::fabs(q.x)),
                   std::fmax(std::fabs(q.y), std::fabs(q.z)));
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q);

}  // namespace qma
