#include "qma/calculus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "qma/errors.hpp"

namespace qma {
namespace {

// e_p * conj(e_r)
constexpr std::array<std::array<Quaternion, 4>, 4> make_unit_products() {
  std::array<std::array<Quaternion, 4>, 4> t{};
  for (int p = 0; p < 4; ++p)
    for (int r = 0; r < 4; ++r) t[p][r] = Quaternion::unit(p) * Quaternion::unit(r).conj();
  return t;
}
constexpr auto kUnitProducts = make_unit_products();

// Writes the quaternionic Hessian at one point into a HermitianField record.
// second(s, t) returns d^2/dx_s dx_t at that point.
template <class Second>
void combine_hessian(std::size_t n, double* out, Second&& second) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double lap = 0.0;
    for (int p = 0; p < 4; ++p) lap += second(4 * i + p, 4 * i + p);
    out[i] = lap;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      Quaternion q;
      for (int p = 0; p < 4; ++p)
        for (int r = 0; r < 4; ++r) q += kUnitProducts[p][r] * second(4 * i + p, 4 * j + r);
      double* rec = out + n + 4 * k;
      rec[0] = q.w;
      rec[1] = q.x;
      rec[2] = q.y;
      rec[3] = q.z;
    }
}

// Adjugate det(U) U^{-1} of one point's matrix.
HyperHermitian adjugate(const HyperHermitian& u, std::size_t point) {
  const double det = moore_det_fast(u);
  if (!(std::fabs(det) > 1e-300) || !std::isfinite(det)) {
    throw PointError("singular hyperhermitian matrix", point);
  }
  if (u.n() == 1) return HyperHermitian::identity(1, 1.0);
  if (u.n() == 2) return HyperHermitian({u.diag()[1], u.diag()[0]}, {-u.upper()[0]});
  try {
    return inverse(u) * det;
  } catch (const SingularMatrix&) {
    throw PointError("singular hyperhermitian matrix", point);
  }
}

HyperHermitian checked_inverse(const HyperHermitian& u, std::size_t point) {
  const double det = moore_det_fast(u);
  if (!(std::fabs(det) > 1e-300) || !std::isfinite(det)) {
    throw PointError("singular hyperhermitian matrix", point);
  }
  try {
    return inverse(u);
  } catch (const SingularMatrix&) {
    throw PointError("singular hyperhermitian matrix", point);
  }
}

// Runs a pointwise kernel that may throw PointError; rethrows the error with
// the smallest point index so the result does not depend on scheduling.
template <class Fn>
void guarded_points(std::size_t count, Exec e, Fn&& fn) {
  std::size_t bad = std::numeric_limits<std::size_t>::max();
  std::string message;
  for_points(count, e, [&](std::size_t p) {
    try {
      fn(p);
    } catch (const PointError& err) {
#pragma omp critical(qma_point_error)
      {
        if (p < bad) {
          bad = p;
          message = err.what();
        }
      }
    }
  });
  if (bad != std::numeric_limits<std::size_t>::max()) throw PointError(message, bad);
}

}  // namespace

HyperHermitian quaternionic_hessian(const Eigen::MatrixXd& h, std::size_t n) {
  if (h.rows() != static_cast<Eigen::Index>(4 * n) || h.cols() != h.rows()) {
    throw DimensionError("quaternionic_hessian: expected a 4n x 4n matrix");
  }
  HyperHermitian out(n);
  std::vector<double> rec(n + 2 * n * (n - 1));
  combine_hessian(n, rec.data(), [&](std::size_t s, std::size_t t) {
    return 0.5 * (h(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) +
                  h(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)));
  });
  std::vector<double> d(rec.begin(), rec.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<Quaternion> u(n * (n - 1) / 2);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double* q = rec.data() + n + 4 * k;
    u[k] = Quaternion(q[0], q[1], q[2], q[3]);
  }
  return HyperHermitian(std::move(d), std::move(u));
}

HermitianField hess_H(const ScalarField& u, const Differentiator& d, Exec e) {
  const Grid& g = u.grid();
  require_same_grid(g, d.grid(), "hess_H");
  const std::size_t m = g.dim();
  const std::vector<ScalarField> second = d.second(u);
  HermitianField out(g);
  auto raw = out.raw();
  const std::size_t stride = out.stride();
  for_points(g.points(), e, [&](std::size_t p) {
    combine_hessian(g.n(), raw.data() + p * stride,
                    [&](std::size_t s, std::size_t t) { return second[s * m + t][p]; });
  });
  return out;
}

HermitianField hess_H(const ScalarField& u, Scheme scheme) {
  return hess_H(u, Differentiator(u.grid(), scheme));
}

HermitianField hess_H_analytic(const TrigPoly& poly, const Grid& g) {
  poly.check_aliasing(g);
  HermitianField out(g);
  std::vector<double> x(g.dim());
  for (std::size_t p = 0; p < g.points(); ++p) {
    g.coords(p, x);
    out.set(p, quaternionic_hessian(poly.hessian(x, g.periods()), g.n()));
  }
  return out;
}

HermitianField positive_hessian_field(const ScalarField& rho, const Differentiator& d,
                                      double* c_out) {
  HermitianField h = hess_H(rho, d);
  const double lowest = grid_min_eig(h).value;
  const double c = 1.5 * std::fabs(lowest) + 1.0;
  if (c_out != nullptr) *c_out = c;
  h += HermitianField(rho.grid(), HyperHermitian::identity(rho.grid().n(), c));
  return h;
}

ScalarField laplace_G(const ScalarField& h, const HermitianField& g, const Differentiator& d,
                      Exec e) {
  require_same_grid(h.grid(), g.grid(), "laplace_G");
  const HermitianField hh = hess_H(h, d, e);
  ScalarField out(h.grid());
  guarded_points(h.size(), e, [&](std::size_t p) {
    out[p] = trace_product(checked_inverse(g.at(p), p), hh.at(p));
  });
  return out;
}

ScalarField laplace_U(const ScalarField& v, const HermitianField& u, const Differentiator& d,
                      Exec e) {
  return laplace_G(v, u, d, e);
}

ScalarField flat_laplacian(const ScalarField& h, const Differentiator& d) {
  ScalarField out(h.grid());
  for (std::size_t s : h.grid().active_axes()) out += d.d2(h, s, s);
  return out;
}

ScalarField dir_laplace(const ScalarField& u, const QuatMatrix& zeta, const Differentiator& d,
                        Exec e) {
  const std::size_t n = u.grid().n();
  if (zeta.rows() != n || zeta.cols() != 1) throw DimensionError("dir_laplace: zeta must be n x 1");
  if (std::fabs(inner(zeta, zeta).w - 1.0) > 1e-12) {
    throw Error("dir_laplace: zeta is not a unit vector");
  }
  const HermitianField hh = hess_H(u, d, e);
  const QuatMatrix zs = zeta.adjoint();
  ScalarField out(u.grid());
  for_points(u.size(), e, [&](std::size_t p) {
    const HyperHermitian h = hh.at(p);
    Quaternion s;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s += zs(0, i) * h(i, j) * zeta(j, 0);
    out[p] = s.w;
  });
  return out;
}

RealSymField div_form_coeffs(const HermitianField& u, Exec e) {
  RealSymField a(u.grid());
  guarded_points(u.points(), e, [&](std::size_t p) { a.set(p, realize(adjugate(u.at(p), p))); });
  return a;
}

ScalarField apply_divergence(const RealSymField& a, const ScalarField& h, const Differentiator& d,
                             Exec e) {
  const Grid& g = h.grid();
  require_same_grid(g, a.grid(), "apply_divergence");
  const auto axes = g.active_axes();
  const std::vector<ScalarField> grad = d.gradient(h);
  ScalarField out(g);
  ScalarField flux(g);
  for (std::size_t s : axes) {
    for_points(g.points(), e, [&](std::size_t p) {
      double w = 0.0;
      for (std::size_t t : axes) w += a(p, s, t) * grad[t][p];
      flux[p] = w;
    });
    out += d.d1(flux, s);
  }
  return out;
}

ScalarField apply_D(const HermitianField& u, const ScalarField& h, DForm form,
                    const Differentiator& d, Exec e) {
  require_same_grid(u.grid(), h.grid(), "apply_D");
  if (form == DForm::divergence) return apply_divergence(div_form_coeffs(u, e), h, d, e);
  const HermitianField hh = hess_H(h, d, e);
  ScalarField out(h.grid());
  guarded_points(h.size(), e, [&](std::size_t p) {
    out[p] = trace_product(adjugate(u.at(p), p), hh.at(p));
  });
  return out;
}

ScalarField moore_det_field(const HermitianField& u, Exec e) {
  ScalarField out(u.grid());
  for_points(u.points(), e, [&](std::size_t p) { out[p] = moore_det_fast(u.at(p)); });
  return out;
}

ScalarField min_eig_field(const HermitianField& u, Exec e) {
  ScalarField out(u.grid());
  for_points(u.points(), e, [&](std::size_t p) { out[p] = min_eig(u.at(p)); });
  return out;
}

GridMin grid_min_eig(const HermitianField& u, Exec e) {
  const ScalarField m = min_eig_field(u, e);
  GridMin best{m[0], 0};
  for (std::size_t p = 1; p < m.size(); ++p)
    if (m[p] < best.value) best = {m[p], p};
  return best;
}

ScalarField trace_field(const HermitianField& u) {
  ScalarField out(u.grid());
  const auto raw = u.raw();
  for (std::size_t p = 0; p < u.points(); ++p) {
    double t = 0.0;
    for (std::size_t i = 0; i < u.n(); ++i) t += raw[p * u.stride() + i];
    out[p] = t;
  }
  return out;
}

double integrate(const ScalarField& f, Exec e) {
  return exec::sum(f.values(), e) / static_cast<double>(f.size()) * f.grid().volume();
}

double integrate(const ScalarField& f, const ScalarField& weight, Exec e) {
  require_same_grid(f.grid(), weight.grid(), "integrate");
  return integrate(multiply(f, weight), e);
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "multiply");
  ScalarField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

}  // namespace qma
