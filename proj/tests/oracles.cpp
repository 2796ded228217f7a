#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

namespace {

// Components of e_a e_b as (sign, index).
struct Unit {
  double sign;
  int index;
};

Unit unit_product(int a, int b) {
  static const Unit table[4][4] = {
      {{1, 0}, {1, 1}, {1, 2}, {1, 3}},
      {{1, 1}, {-1, 0}, {1, 3}, {-1, 2}},
      {{1, 2}, {-1, 3}, {-1, 0}, {1, 1}},
      {{1, 3}, {1, 2}, {-1, 1}, {-1, 0}},
  };
  return table[a][b];
}

}  // namespace

Eigen::MatrixXd realize(const qma::QuatMatrix& a) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(4 * a.rows(), 4 * a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (int c = 0; c < 4; ++c)
        for (int p = 0; p < 4; ++p) {
          const Unit u = unit_product(c, p);
          r(4 * i + u.index, 4 * j + p) += u.sign * a(i, j)[c];
        }
  return r;
}

double complex_det(const Eigen::MatrixXcd& h) { return h.partialPivLu().determinant().real(); }

qma::HyperHermitian embed(const Eigen::MatrixXcd& h) {
  const auto n = static_cast<std::size_t>(h.rows());
  qma::HyperHermitian out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const auto z = h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out.set(i, j, qma::Quaternion(z.real(), z.imag()));
    }
  return out;
}

double mixed_det_polarized(std::span<const qma::HyperHermitian> args) {
  const std::size_t n = args.size();
  double total = 0.0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    qma::HyperHermitian s(args[0].n());
    int count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) {
        s += args[i];
        ++count;
      }
    const double sign = (n - static_cast<std::size_t>(count)) % 2 == 0 ? 1.0 : -1.0;
    total += sign * qma::moore_det(s);
  }
  double fact = 1.0;
  for (std::size_t i = 2; i <= n; ++i) fact *= static_cast<double>(i);
  return total / fact;
}

std::vector<double> trig_laplacian(const qma::TrigPoly& p, const qma::Grid& g) {
  std::vector<double> out(g.points(), 0.0);
  for (std::size_t q = 0; q < g.points(); ++q) {
    const auto x = g.coords(q);
    for (const auto& t : p.terms()) {
      double phase = 0.0, k2 = 0.0;
      for (std::size_t s = 0; s < g.dim(); ++s) {
        const double w = 2.0 * std::numbers::pi * t.k[s] / g.period(s);
        phase += w * x[s];
        k2 += w * w;
      }
      out[q] -= k2 * (t.cos * std::cos(phase) + t.sin * std::sin(phase));
    }
  }
  return out;
}

std::vector<double> trig_values(const qma::TrigPoly& p, const qma::Grid& g) {
  std::vector<double> out(g.points(), 0.0);
  for (std::size_t q = 0; q < g.points(); ++q) {
    const auto x = g.coords(q);
    for (const auto& t : p.terms()) {
      double phase = 0.0;
      for (std::size_t s = 0; s < g.dim(); ++s)
        phase += 2.0 * std::numbers::pi * t.k[s] * x[s] / g.period(s);
      out[q] += t.cos * std::cos(phase) + t.sin * std::sin(phase);
    }
  }
  return out;
}

std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& v,
                                      const qma::Grid& g, bool inverse) {
  std::vector<std::complex<double>> cur = v;
  for (std::size_t axis : g.active_axes()) {
    const int N = g.size(axis);
    const std::size_t stride = g.stride(axis);
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<std::complex<double>> next(cur.size());
    for (std::size_t q = 0; q < cur.size(); ++q) {
      const int m = g.coord_index(q, axis);
      const std::size_t base = q - static_cast<std::size_t>(m) * stride;
      std::complex<double> acc = 0.0;
      for (int j = 0; j < N; ++j) {
        const double ang = sign * 2.0 * std::numbers::pi * m * j / N;
        acc += cur[base + static_cast<std::size_t>(j) * stride] * std::polar(1.0, ang);
      }
      next[q] = inverse ? acc / static_cast<double>(N) : acc;
    }
    cur.swap(next);
  }
  return cur;
}

std::vector<double> poisson(const std::vector<double>& rhs, const qma::Grid& g) {
  std::vector<std::complex<double>> v(rhs.begin(), rhs.end());
  auto spec = dft(v, g, false);
  for (std::size_t q = 0; q < spec.size(); ++q) {
    double k2 = 0.0;
    for (std::size_t axis : g.active_axes()) {
      const int N = g.size(axis);
      int m = g.coord_index(q, axis);
      if (m > N / 2) m -= N;
      const double w = 2.0 * std::numbers::pi * m / g.period(axis);
      k2 += w * w;
    }
    spec[q] = k2 == 0.0 ? 0.0 : -spec[q] / k2;
  }
  const auto back = dft(spec, g, true);
  std::vector<double> out(back.size());
  std::transform(back.begin(), back.end(), out.begin(), [](auto z) { return z.real(); });
  return out;
}

}  // namespace oracle
