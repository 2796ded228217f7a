#include "qma/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "qma/errors.hpp"
#include "qma/exec.hpp"

namespace qma {

void CheckReport::absorb(const CheckReport& other, std::size_t location) {
  samples += other.samples;
  pass = pass && other.pass;
  // Worst sample: smallest margin measured in units of its tolerance.
  const auto badness = [](const CheckReport& r) {
    return r.tol > 0.0 ? r.margin / r.tol : r.margin;
  };
  if (samples == other.samples || badness(other) < badness(*this)) {
    margin = other.margin;
    tol = other.tol;
    scale = other.scale;
    worst_location = location;
  }
}

CheckReport empty_report(std::string name, std::uint64_t seed) {
  CheckReport r;
  r.check = std::move(name);
  r.seed = seed;
  return r;
}

namespace {

CheckReport finish(std::string name, double margin, double rel_tol, double scale,
                   std::size_t samples, std::size_t where) {
  CheckReport r;
  r.check = std::move(name);
  r.samples = samples;
  r.margin = margin;
  r.scale = scale;
  r.tol = rel_tol * scale;
  r.worst_location = where;
  r.pass = std::isfinite(margin) && margin >= -r.tol;
  return r;
}

void require_positive_matrix(const HyperHermitian& a, const char* what) {
  if (!(min_eig(a) > 0.0)) throw NotPositiveDefinite(std::string(what) + " is not positive definite");
}

HyperHermitian record_at(const HermitianField& f, std::size_t p) { return f.at(p); }

// Re Tr(X Y) for general quaternionic matrices.
double re_trace(const QuatMatrix& x, const QuatMatrix& y) { return (x * y).trace(); }

// Component-wise first derivatives of a hermitian field, indexed by axis.
std::vector<HermitianField> field_gradient(const HermitianField& u, const Differentiator& d) {
  const Grid& g = u.grid();
  std::vector<HermitianField> out(g.dim(), HermitianField(g));
  for (std::size_t c = 0; c < u.stride(); ++c) {
    const auto grad = d.gradient(u.component(c));
    for (std::size_t s : g.active_axes()) out[s].set_component(c, grad[s]);
  }
  return out;
}

// Component-wise second derivatives, indexed s * dim + t.
std::vector<HermitianField> field_second(const HermitianField& u, const Differentiator& d) {
  const Grid& g = u.grid();
  const std::size_t m = g.dim();
  std::vector<HermitianField> out(m * m, HermitianField(g));
  for (std::size_t c = 0; c < u.stride(); ++c) {
    const auto sec = d.second(u.component(c));
    for (std::size_t s : g.active_axes())
      for (std::size_t t : g.active_axes()) out[s * m + t].set_component(c, sec[s * m + t]);
  }
  return out;
}

// Real Hessian of log F per point from spectral derivatives of F itself:
// (log F)_st = F_st / F - F_s F_t / F^2.
struct LogHessian {
  std::vector<ScalarField> second;  // s * dim + t
};

LogHessian log_hessian(const ScalarField& F, const Differentiator& d) {
  const Grid& g = F.grid();
  const std::size_t m = g.dim();
  const auto grad = d.gradient(F);
  auto sec = d.second(F);
  for (std::size_t s : g.active_axes())
    for (std::size_t t : g.active_axes()) {
      ScalarField& x = sec[s * m + t];
      for (std::size_t p = 0; p < x.size(); ++p)
        x[p] = x[p] / F[p] - grad[s][p] * grad[t][p] / (F[p] * F[p]);
    }
  return {std::move(sec)};
}

Eigen::MatrixXd real_matrix_at(const std::vector<ScalarField>& second, std::size_t m,
                               std::size_t p) {
  Eigen::MatrixXd h(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t t = 0; t < m; ++t)
      h(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = second[s * m + t][p];
  return h;
}

// Re(zeta* H zeta).
double rayleigh(const HyperHermitian& h, const QuatMatrix& zeta) {
  Quaternion s;
  const std::size_t n = h.n();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s += zeta(i, 0).conj() * h(i, j) * zeta(j, 0);
  return s.w;
}

void check_unit(const QuatMatrix& zeta, std::size_t n) {
  if (zeta.rows() != n || zeta.cols() != 1) throw DimensionError("zeta must be an n x 1 column");
  if (std::fabs(inner(zeta, zeta).w - 1.0) > 1e-12) throw Error("zeta is not a unit vector");
}

void check_field_positive(const HermitianField& u) {
  const GridMin m = grid_min_eig(u);
  if (!(m.value > 0.0)) throw PointError("field is not positive definite", m.point);
}

}  // namespace

// ------------------------------------------------------------ random inputs

Quaternion random_quaternion(Rng& rng, double amp) {
  std::uniform_real_distribution<double> u(-amp, amp);
  const double w = u(rng), x = u(rng), y = u(rng), z = u(rng);
  return {w, x, y, z};
}

QuatMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double amp) {
  QuatMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = random_quaternion(rng, amp);
  return m;
}

HyperHermitian random_hyperhermitian(std::size_t n, Rng& rng, double amp) {
  std::uniform_real_distribution<double> u(-amp, amp);
  HyperHermitian h(n);
  for (std::size_t i = 0; i < n; ++i) {
    h.set(i, i, Quaternion(u(rng)));
    for (std::size_t j = i + 1; j < n; ++j) h.set(i, j, random_quaternion(rng, amp));
  }
  return h;
}

HyperHermitian random_positive(std::size_t n, Rng& rng, double shift) {
  const QuatMatrix c = random_matrix(n, n, rng);
  HyperHermitian a = HyperHermitian::from_matrix(c.adjoint() * c);
  a += HyperHermitian::identity(n, shift);
  return a;
}

QuatMatrix random_unitary(std::size_t n, Rng& rng) {
  return eig(random_hyperhermitian(n, rng)).eigenvectors;
}

QuatMatrix random_unit_vector(std::size_t n, Rng& rng) {
  QuatMatrix v = random_matrix(n, 1, rng);
  v *= 1.0 / std::sqrt(inner(v, v).w);
  return v;
}

PositiveField make_positive_field(const TrigPoly& rho, const Grid& g, Scheme scheme) {
  PositiveField out;
  out.poly = rho;
  out.rho = sample_trigpoly(rho, g);
  out.U = positive_hessian_field(out.rho, Differentiator(g, scheme), &out.c);
  return out;
}

TrigPoly random_potential(const Grid& g, std::uint64_t seed, int kmax, int terms, double amp) {
  const auto axes = g.active_axes();
  return TrigPoly::random(g.dim(), axes, kmax, terms, amp, seed);
}

// ----------------------------------------------------------- matrix checks

CheckReport check_det_ineq(const HyperHermitian& a, const HyperHermitian& b) {
  if (a.n() != b.n()) throw DimensionError("check_det_ineq: size mismatch");
  require_positive_matrix(a, "A");
  require_positive_matrix(b, "B");
  const double n = static_cast<double>(a.n());
  const double da = moore_det(a), db = moore_det(b);
  const double lhs = n - trace_product(inverse(a), b);
  const double rhs = n * (1.0 - std::pow(db / da, 1.0 / n));
  return finish("det_ineq", rhs - lhs, 1e-10, std::max(std::fabs(lhs), std::fabs(rhs)) + 1.0, 1,
                0);
}

CheckReport check_mixed_trace(const HyperHermitian& a, const HyperHermitian& b) {
  if (a.n() != b.n()) throw DimensionError("check_mixed_trace: size mismatch");
  const std::size_t n = a.n();
  const double da = moore_det(a);
  if (!(std::fabs(da) > 1e-300)) throw SingularMatrix("check_mixed_trace: A is singular");
  const double lhs = da * trace_product(inverse(a), b);
  std::vector<HyperHermitian> args(n, a);
  args.back() = b;
  const double rhs = static_cast<double>(n) * mixed_det(args);
  return finish("mixed_trace", -std::fabs(lhs - rhs), 1e-9,
                std::max(std::fabs(lhs), std::fabs(rhs)) + 1.0, 1, 0);
}

CheckReport check_trace_square(const HyperHermitian& a, const HyperHermitian& b) {
  require_positive_matrix(a, "A");
  const QuatMatrix ai = inverse(a).to_matrix();
  const QuatMatrix x = ai * b.to_matrix();
  const double direct = re_trace(x, x);
  const SimultaneousDiagonalization sd = simdiag(a, b);
  double d2 = 0.0;
  for (double v : sd.d) d2 += v * v;
  const double scale = std::max(std::fabs(direct), d2) + 1.0;
  CheckReport r = finish("trace_square", std::min(direct, -std::fabs(direct - d2)), 1e-10, scale,
                         1, 0);
  return r;
}

// ------------------------------------------------------------ field checks

CheckReport check_dir_ineq(const HermitianField& U, const QuatMatrix& zeta, Scheme scheme) {
  const Grid& g = U.grid();
  const std::size_t n = g.n(), m = g.dim();
  check_unit(zeta, n);
  check_field_positive(U);
  const Differentiator d(g, scheme);
  HermitianField dz(g);
  for (std::size_t c = 0; c < U.stride(); ++c) dz.set_component(c, dir_laplace(U.component(c), zeta, d));
  const LogHessian lh = log_hessian(moore_det_field(U), d);
  double worst = std::numeric_limits<double>::infinity(), scale = 0.0;
  std::size_t where = 0;
  for (std::size_t p = 0; p < g.points(); ++p) {
    const HyperHermitian u = record_at(U, p);
    const double lhs = trace_product(inverse(u), dz.at(p));
    const double rhs = rayleigh(quaternionic_hessian(real_matrix_at(lh.second, m, p), n), zeta);
    scale = std::max({scale, std::fabs(lhs), std::fabs(rhs)});
    if (lhs - rhs < worst) {
      worst = lhs - rhs;
      where = p;
    }
  }
  return finish("dir_ineq", worst, 1e-6, scale + 1.0, g.points(), where);
}

CheckReport check_pogorelov(const HermitianField& U, Scheme scheme) {
  const Grid& g = U.grid();
  const std::size_t n = g.n(), m = g.dim();
  check_field_positive(U);
  const Differentiator d(g, scheme);
  const ScalarField T = trace_field(U);
  const auto gT = d.gradient(T);
  auto gamma2 = d.second(T);
  // Hessian of 2 sqrt(T) by the chain rule.
  for (std::size_t s : g.active_axes())
    for (std::size_t t : g.active_axes()) {
      ScalarField& x = gamma2[s * m + t];
      for (std::size_t p = 0; p < x.size(); ++p) {
        const double r = std::sqrt(T[p]);
        x[p] = x[p] / r - gT[s][p] * gT[t][p] / (2.0 * r * T[p]);
      }
    }
  const LogHessian lh = log_hessian(moore_det_field(U), d);
  double worst = std::numeric_limits<double>::infinity(), scale = 0.0;
  std::size_t where = 0;
  for (std::size_t p = 0; p < g.points(); ++p) {
    const HyperHermitian u = record_at(U, p);
    const double lhs =
        trace_product(inverse(u), quaternionic_hessian(real_matrix_at(gamma2, m, p), n));
    double lap = 0.0;
    for (std::size_t s : g.active_axes()) lap += lh.second[s * m + s][p];
    const double rhs = lap / std::sqrt(T[p]);
    scale = std::max({scale, std::fabs(lhs), std::fabs(rhs)});
    if (lhs - rhs < worst) {
      worst = lhs - rhs;
      where = p;
    }
  }
  return finish("pogorelov", worst, 1e-5, scale + 1.0, g.points(), where);
}

CheckReport check_third_deriv(const TrigPoly& rho, double c, std::size_t n,
                              std::span<const double> z, std::span<const double> periods,
                              double eps_pos) {
  const std::size_t m = 4 * n;
  if (z.size() != m || periods.size() != m) throw DimensionError("check_third_deriv: bad point");
  HyperHermitian u0 = quaternionic_hessian(rho.hessian(z, periods), n);
  u0 += HyperHermitian::identity(n, c);
  const std::vector<Eigen::MatrixXd> third = rho.third(z, periods);
  std::vector<HyperHermitian> du(m);
  for (std::size_t a = 0; a < m; ++a) du[a] = quaternionic_hessian(third[a], n);

  const EigenDecomposition e = eig(u0);
  const QuatMatrix& xi = e.eigenvectors;
  const Eigen::MatrixXd R = realize(xi);
  const HyperHermitian ut = congruence(u0, xi);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(ut.diag()[i] > eps_pos)) {
      throw NotPositiveDefinite("check_third_deriv: degenerate diagonal entry " + std::to_string(i));
    }
  }
  // Derivatives of the transformed field along the new coordinates.
  std::vector<HyperHermitian> dut(m);
  for (std::size_t s = 0; s < m; ++s) {
    HyperHermitian acc(n);
    for (std::size_t t = 0; t < m; ++t) {
      const double w = R(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s));
      if (w != 0.0) acc += du[t] * w;
    }
    dut[s] = congruence(acc, xi);
  }
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const double den = ut.diag()[i] * ut.diag()[k];
      for (int p = 0; p < 4; ++p) {
        const double v = dut[4 * i + p].diag()[k];
        lhs += v * v / den;
        for (std::size_t l = 0; l < n; ++l) rhs += 2.0 * dut[4 * l + p](k, i).norm2() / den;
      }
    }
  return finish("third_deriv", rhs - lhs, 1e-6, std::max(lhs, rhs) + 1.0, 1, 0);
}

double divergence_tolerance(const Grid& g, Scheme scheme) {
  if (scheme == Scheme::spectral) return 1e-7;
  // Truncation factor of the stencil at unit frequency.
  double wh = 0.0;
  for (std::size_t s : g.active_axes())
    wh = std::max(wh, 2.0 * std::numbers::pi * g.spacing(s) / g.period(s));
  return scheme == Scheme::fd2 ? wh * wh : wh * wh * wh * wh;
}

CheckReport check_divergence(const HermitianField& U, Scheme scheme) {
  const Grid& g = U.grid();
  const Differentiator d(g, scheme);
  const RealSymField a = div_form_coeffs(U);
  const double norm = a.max_abs();
  double worst = 0.0;
  std::size_t where = 0;
  for (std::size_t t = 0; t < g.dim(); ++t) {
    ScalarField div(g);
    for (std::size_t s : g.active_axes()) div += d.d1(a.entry(s, t), s);
    for (std::size_t p = 0; p < div.size(); ++p)
      if (std::fabs(div[p]) > worst) {
        worst = std::fabs(div[p]);
        where = p;
      }
  }
  return finish("divergence", -worst / (1.0 + norm), divergence_tolerance(g, scheme), 1.0,
                g.points(), where);
}

CheckReport check_logdet_identity(const HermitianField& U, Scheme scheme,
                                  std::optional<std::pair<std::size_t, std::size_t>> axes) {
  const Grid& g = U.grid();
  const std::size_t m = g.dim();
  const Differentiator d(g, scheme);
  const auto du = field_gradient(U, d);
  const auto ddu = field_second(U, d);
  const ScalarField F = moore_det_field(U);
  for (std::size_t p = 0; p < F.size(); ++p)
    if (!(std::fabs(F[p]) > 1e-300)) throw PointError("singular hyperhermitian matrix", p);
  const LogHessian lh = log_hessian(F, d);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (axes) {
    if (axes->first >= m || axes->second >= m) throw DimensionError("axis out of range");
    pairs.push_back(*axes);
  } else {
    const auto act = g.active_axes();
    for (std::size_t i = 0; i < act.size(); ++i)
      for (std::size_t j = i; j < act.size(); ++j) pairs.emplace_back(act[i], act[j]);
  }
  double worst = 0.0, scale = 0.0;
  std::size_t where = 0;
  for (std::size_t p = 0; p < g.points(); ++p) {
    const QuatMatrix ui = inverse(record_at(U, p)).to_matrix();
    for (const auto& [a, b] : pairs) {
      const double t1 = re_trace(ui, ddu[a * m + b].at(p).to_matrix());
      const QuatMatrix xa = ui * du[a].at(p).to_matrix();
      const QuatMatrix xb = ui * du[b].at(p).to_matrix();
      const double t2 = re_trace(xa, xb);
      const double t3 = lh.second[a * m + b][p];
      scale = std::max({scale, std::fabs(t1), std::fabs(t2), std::fabs(t3)});
      const double defect = std::fabs(t1 - t2 - t3);
      if (defect > worst) {
        worst = defect;
        where = p;
      }
    }
  }
  return finish("logdet_identity", -worst, 1e-7, scale + 1.0, g.points() * pairs.size(), where);
}

CheckReport check_gl_transform(const TrigPoly& u, const Grid& g, const QuatMatrix& a) {
  const std::size_t n = g.n(), m = g.dim();
  if (a.rows() != n || a.cols() != n) throw DimensionError("check_gl_transform: A must be n x n");
  if (max_abs_diff(a.adjoint() * a, QuatMatrix::identity(n)) > 1e-10) {
    throw Error("check_gl_transform: A is not unitary");
  }
  const Eigen::MatrixXd R = realize(a);
  std::vector<double> y(m);
  Eigen::VectorXd x(static_cast<Eigen::Index>(m));
  double worst = 0.0, scale = 0.0;
  std::size_t where = 0;
  for (std::size_t p = 0; p < g.points(); ++p) {
    g.coords(p, y);
    x = R * Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(m));
    const Eigen::MatrixXd h = u.hessian(std::span<const double>(x.data(), m), g.periods());
    const HyperHermitian lhs = quaternionic_hessian(R.transpose() * h * R, n);
    const HyperHermitian rhs = congruence(quaternionic_hessian(h, n), a);
    scale = std::max({scale, lhs.max_abs(), rhs.max_abs()});
    const double defect = (lhs - rhs).max_abs();
    if (defect > worst) {
      worst = defect;
      where = p;
    }
  }
  return finish("gl_transform", -worst, 1e-8, scale + 1.0, g.points(), where);
}

TrigPoly third_deriv_family(std::size_t n, std::span<const double> z,
                            std::span<const double> periods, std::uint64_t seed) {
  const std::size_t m = 4 * n;
  Rng rng(seed);
  std::uniform_real_distribution<double> amp(-0.02, 0.02);
  std::uniform_int_distribution<int> freq(-1, 1);
  TrigPoly poly;
  // Separable part: each term depends on one quaternionic variable.
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < 2; ++c) {
      TrigTerm t;
      t.k.assign(m, 0);
      while (std::all_of(t.k.begin(), t.k.end(), [](int v) { return v == 0; }))
        for (int p = 0; p < 4; ++p) t.k[4 * i + static_cast<std::size_t>(p)] = freq(rng);
      t.cos = amp(rng);
      t.sin = amp(rng);
      poly.add(std::move(t));
    }
  // sin(theta(x) - theta(z)): zero Hessian at z, nonzero third derivatives.
  for (int c = 0; c < 3; ++c) {
    TrigTerm t;
    t.k.assign(m, 0);
    while (std::all_of(t.k.begin(), t.k.end(), [](int v) { return v == 0; }))
      for (std::size_t s = 0; s < m; ++s) t.k[s] = freq(rng);
    double theta = 0.0;
    for (std::size_t s = 0; s < m; ++s) theta += 2.0 * std::numbers::pi * t.k[s] * z[s] / periods[s];
    const double a = amp(rng);
    t.cos = -a * std::sin(theta);
    t.sin = a * std::cos(theta);
    poly.add(std::move(t));
  }
  return poly;
}

// ------------------------------------------------------------ suites

bool SuiteResult::pass() const {
  return std::all_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.pass; });
}

void SuiteResult::write_csv(std::ostream& os) const {
  os << "check,seed,samples,margin,tol,pass\n";
  char buf[256];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%s,%llu,%zu,%.17g,%.17g,%d\n", r.check.c_str(),
                  static_cast<unsigned long long>(r.seed), r.samples, r.margin, r.tol,
                  r.pass ? 1 : 0);
    os << buf;
  }
}

std::string SuiteResult::summary_json() const {
  nlohmann::ordered_json j;
  j["pass"] = pass();
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json c;
    c["check"] = r.check;
    c["seed"] = r.seed;
    c["samples"] = r.samples;
    c["margin"] = r.margin;
    c["tol"] = r.tol;
    c["worst_location"] = r.worst_location;
    c["pass"] = r.pass;
    j["checks"].push_back(c);
  }
  return j.dump(2);
}

namespace {

std::size_t pick_n(Rng& rng, std::size_t max_n) {
  return std::uniform_int_distribution<std::size_t>(1, max_n)(rng);
}

// A complex hermitian matrix placed in the (w, x) components.
HyperHermitian random_complex_hermitian(std::size_t n, Rng& rng, Eigen::MatrixXcd& out) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HyperHermitian h(n);
  out.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double d = u(rng);
    h.set(i, i, Quaternion(d));
    out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double re = u(rng), im = u(rng);
      h.set(i, j, Quaternion(re, im, 0.0, 0.0));
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = {re, im};
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = {re, -im};
    }
  }
  return h;
}

CheckReport relative_defect(std::string name, double got, double want, double rel_tol,
                            double scale) {
  return finish(std::move(name), -std::fabs(got - want), rel_tol, scale, 1, 0);
}

// Both orderings (i, j) and (j, i) of the Dirac composition, assembled
// independently from the second partials; returns the hyperhermitian defect.
CheckReport hessian_symmetry(const ScalarField& u, const Differentiator& d) {
  const Grid& g = u.grid();
  const std::size_t n = g.n(), m = g.dim();
  const auto sec = d.second(u);
  double worst = 0.0, scale = 0.0;
  std::size_t where = 0;
  for (std::size_t pt = 0; pt < g.points(); ++pt)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Quaternion hij, hji;
        for (int p = 0; p < 4; ++p)
          for (int r = 0; r < 4; ++r) {
            const Quaternion e = Quaternion::unit(p) * Quaternion::unit(r).conj();
            hij += e * sec[(4 * i + p) * m + 4 * j + r][pt];
            hji += e * sec[(4 * j + p) * m + 4 * i + r][pt];
          }
        scale = std::max(scale, qma::max_abs(hij));
        const double defect = qma::max_abs(hij - hji.conj());
        if (defect > worst) {
          worst = defect;
          where = pt;
        }
      }
  return finish("hessian_symmetry", -worst, 1e-11, scale + 1.0, g.points(), where);
}

Grid acceptance_grid() { return Grid(2, {8, 8, 8, 8, 1, 1, 1, 1}); }
Grid mixed_grid() { return Grid(2, {8, 8, 1, 1, 8, 8, 1, 1}); }

}  // namespace

SuiteResult run_algebra_suite(std::uint64_t seed, int trials) {
  Rng rng(seed);
  CheckReport congr = empty_report("congruence", seed);
  CheckReport real4 = empty_report("realization_det", seed);
  CheckReport cplx = empty_report("complex_embedding", seed);
  CheckReport closed = empty_report("closed_form_2x2", seed);
  CheckReport mixsym = empty_report("mixed_symmetry", seed);
  CheckReport mixlin = empty_report("mixed_multilinear", seed);
  CheckReport mixdiag = empty_report("mixed_diagonal", seed);
  CheckReport mixpos = empty_report("mixed_positive", seed);
  CheckReport detin = empty_report("det_ineq", seed);
  CheckReport mtrace = empty_report("mixed_trace", seed);
  CheckReport tsq = empty_report("trace_square", seed);
  for (int k = 0; k < trials; ++k) {
    const auto where = static_cast<std::size_t>(k);
    const std::size_t n = pick_n(rng, 4);
    const HyperHermitian a = random_hyperhermitian(n, rng);
    const QuatMatrix c = random_matrix(n, n, rng);
    const double da = moore_det(a);
    const double dcc = moore_det(HyperHermitian::from_matrix(c.adjoint() * c));
    const double dcong = moore_det(congruence(a, c));
    congr.absorb(finish("congruence", -std::fabs(dcong - da * dcc), 1e-9,
                        (1.0 + std::fabs(da)) * (1.0 + std::fabs(dcc)), 1, 0),
                 where);
    const double dr = realize(a).determinant();
    const double p4 = da * da * da * da;
    real4.absorb(relative_defect("realization_det", dr, p4, 1e-8, std::max(std::fabs(p4), 1e-300)),
                 where);

    Eigen::MatrixXcd hc;
    const HyperHermitian h = random_complex_hermitian(n, rng, hc);
    const double cdet = hc.determinant().real();
    cplx.absorb(relative_defect("complex_embedding", moore_det(h), cdet, 1e-10,
                                std::max(std::fabs(cdet), 1.0)),
                where);

    const HyperHermitian two = random_hyperhermitian(2, rng);
    const double formula = two.diag()[0] * two.diag()[1] - two.upper()[0].norm2();
    closed.absorb(relative_defect("closed_form_2x2", moore_det(two), formula, 1e-12,
                                  std::max(std::fabs(formula), 1.0)),
                  where);

    const std::size_t nm = pick_n(rng, 3);
    std::vector<HyperHermitian> args;
    for (std::size_t i = 0; i < nm; ++i) args.push_back(random_hyperhermitian(nm, rng));
    const double base = mixed_det(args);
    std::vector<HyperHermitian> perm(args.rbegin(), args.rend());
    const double scale_m = std::fabs(base) + 1.0;
    mixsym.absorb(relative_defect("mixed_symmetry", mixed_det(perm), base, 1e-9, scale_m), where);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    const double lam = coef(rng), mu = coef(rng);
    const HyperHermitian other = random_hyperhermitian(nm, rng);
    std::vector<HyperHermitian> combo = args, alt = args;
    combo[0] = args[0] * lam + other * mu;
    alt[0] = other;
    const double want = lam * base + mu * mixed_det(alt);
    mixlin.absorb(relative_defect("mixed_multilinear", mixed_det(combo), want, 1e-9,
                                  std::fabs(want) + std::fabs(lam * base) + 1.0),
                  where);
    const std::vector<HyperHermitian> same(nm, args[0]);
    const double dd = moore_det(args[0]);
    mixdiag.absorb(relative_defect("mixed_diagonal", mixed_det(same), dd, 1e-9, std::fabs(dd) + 1.0),
                   where);
    std::vector<HyperHermitian> pos;
    for (std::size_t i = 0; i < nm; ++i) pos.push_back(random_positive(nm, rng));
    const double mp = mixed_det(pos);
    mixpos.absorb(finish("mixed_positive", mp, 1e-9, 1.0, 1, 0), where);
    if (!(mp > 0.0)) mixpos.pass = false;

    const HyperHermitian pa = random_positive(n, rng), pb = random_positive(n, rng);
    detin.absorb(check_det_ineq(pa, pb), where);
    mtrace.absorb(check_mixed_trace(pa, random_hyperhermitian(n, rng)), where);
    tsq.absorb(check_trace_square(pa, random_hyperhermitian(n, rng)), where);
  }
  return {{congr, real4, cplx, closed, mixsym, mixlin, mixdiag, mixpos, detin, mtrace, tsq}};
}

SuiteResult run_calculus_suite(std::uint64_t seed, int trials) {
  const int fields = std::min(trials, 4);
  const Grid g = acceptance_grid();
  const Scheme s = Scheme::spectral;
  CheckReport sym = empty_report("hessian_symmetry", seed);
  CheckReport hexact = empty_report("hessian_exact", seed);
  CheckReport slice = empty_report("real_slice", seed);
  CheckReport gl = empty_report("gl_transform", seed);
  CheckReport logdet = empty_report("logdet_identity", seed);
  CheckReport div = empty_report("divergence", seed);
  CheckReport adj = empty_report("self_adjoint", seed);
  Rng rng(seed);
  const Differentiator d(g, s);
  for (int k = 0; k < fields; ++k) {
    const auto where = static_cast<std::size_t>(k);
    const std::uint64_t fs = seed * 1000003ULL + static_cast<std::uint64_t>(k);
    const TrigPoly rho = random_potential(g, fs);
    const PositiveField pf = make_positive_field(rho, g, s);

    sym.absorb(hessian_symmetry(pf.rho, d), where);

    const HermitianField exact = hess_H_analytic(rho, g);
    const HermitianField numeric = hess_H(pf.rho, d);
    double defect = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < numeric.raw().size(); ++i) {
      defect = std::max(defect, std::fabs(numeric.raw()[i] - exact.raw()[i]));
      scale = std::max(scale, std::fabs(exact.raw()[i]));
    }
    hexact.absorb(finish("hessian_exact", -defect, 1e-10, scale + 1.0, g.points(), 0), where);

    // Real slice: a function of the real parts only.
    std::vector<std::size_t> reals{0, 4};
    const Grid gs(2, {8, 1, 1, 1, 8, 1, 1, 1});
    const TrigPoly sp = TrigPoly::random(8, reals, 2, 4, 0.1, fs + 17);
    const ScalarField sv = sample_trigpoly(sp, gs);
    const HermitianField sh = hess_H(sv, Differentiator(gs, s));
    double sdef = 0.0, sscale = 0.0;
    std::vector<double> x(8);
    for (std::size_t p = 0; p < gs.points(); ++p) {
      gs.coords(p, x);
      const Eigen::MatrixXd h = sp.hessian(x, gs.periods());
      const HyperHermitian got = sh.at(p);
      sdef = std::max({sdef, std::fabs(got.diag()[0] - h(0, 0)), std::fabs(got.diag()[1] - h(4, 4)),
                       std::fabs(got.upper()[0].w - h(0, 4)),
                       qma::max_abs(got.upper()[0] - Quaternion(got.upper()[0].w))});
      sscale = std::max(sscale, h.cwiseAbs().maxCoeff());
    }
    slice.absorb(finish("real_slice", -sdef, 1e-10, sscale + 1.0, gs.points(), 0), where);

    gl.absorb(check_gl_transform(rho, g, random_unitary(2, rng)), where);

    // The identities on the standard grid and on one where both variables vary.
    for (const Grid& gg : {g, mixed_grid()}) {
      const Differentiator dd(gg, s);
      const PositiveField pg = &gg == &g ? pf : make_positive_field(random_potential(gg, fs), gg, s);
      logdet.absorb(check_logdet_identity(pg.U, s), where);
      div.absorb(check_divergence(pg.U, s), where);

      // <D h1, h2> = <h1, D h2> for the divergence form.
      const ScalarField h1 = sample_trigpoly(random_potential(gg, fs + 101, 2, 4, 1.0), gg);
      const ScalarField h2 = h1 + sample_trigpoly(random_potential(gg, fs + 202, 2, 4, 1.0), gg);
      const ScalarField d1 = apply_D(pg.U, h1, DForm::divergence, dd);
      const ScalarField d2 = apply_D(pg.U, h2, DForm::divergence, dd);
      const double l = integrate(multiply(d1, h2));
      const double r = integrate(multiply(h1, d2));
      const auto norm = [](const ScalarField& v) { return std::sqrt(integrate(multiply(v, v))); };
      const double sc = norm(d1) * norm(h2) + norm(h1) * norm(d2);
      adj.absorb(finish("self_adjoint", -std::fabs(l - r) / sc, 1e-8, 1.0, 1, 0), where);
    }
  }
  for (CheckReport* r : {&sym, &hexact, &slice, &gl, &logdet, &div, &adj}) r->seed = seed;
  return {{sym, hexact, slice, gl, logdet, div, adj}};
}

SuiteResult run_estimates_suite(std::uint64_t seed, int trials) {
  Rng rng(seed);
  CheckReport detin = empty_report("det_ineq", seed);
  CheckReport mtrace = empty_report("mixed_trace", seed);
  CheckReport dir = empty_report("dir_ineq", seed);
  CheckReport pog = empty_report("pogorelov", seed);
  CheckReport third = empty_report("third_deriv", seed);
  for (int k = 0; k < trials; ++k) {
    const std::size_t n = pick_n(rng, 4);
    const HyperHermitian a = random_positive(n, rng), b = random_positive(n, rng);
    detin.absorb(check_det_ineq(a, b), static_cast<std::size_t>(k));
    mtrace.absorb(check_mixed_trace(a, random_hyperhermitian(n, rng)), static_cast<std::size_t>(k));
  }
  const int fields = std::min(trials, 10);
  for (int k = 0; k < fields; ++k) {
    const Grid g = k % 2 == 0 ? acceptance_grid() : mixed_grid();
    const std::uint64_t fs = seed * 1000003ULL + static_cast<std::uint64_t>(k);
    const PositiveField pf = make_positive_field(random_potential(g, fs), g, Scheme::spectral);
    dir.absorb(check_dir_ineq(pf.U, random_unit_vector(2, rng), Scheme::spectral),
               static_cast<std::size_t>(k));
    pog.absorb(check_pogorelov(pf.U, Scheme::spectral), static_cast<std::size_t>(k));
  }
  const int points = std::min(trials, 20);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  for (int k = 0; k < points; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 2);
    std::vector<double> z(4 * n), periods(4 * n, 1.0);
    for (double& v : z) v = coord(rng);
    const TrigPoly rho = third_deriv_family(n, z, periods, seed + static_cast<std::uint64_t>(k));
    // The shift c follows the usual rule, using the Hessian at z.
    const double low = eig(quaternionic_hessian(rho.hessian(z, periods), n)).min_eigenvalue();
    third.absorb(check_third_deriv(rho, 1.5 * std::fabs(low) + 1.0, n, z, periods),
                 static_cast<std::size_t>(k));
  }
  return {{detin, mtrace, dir, pog, third}};
}

}  // namespace qma
