#include "qma/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "qma/errors.hpp"
#include "qma/exec.hpp"

namespace qma {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::positivity_lost: return "positivity_lost";
    case SolveStatus::no_convergence: return "no_convergence";
    case SolveStatus::stalled: return "stalled";
  }
  return "unknown";
}

double SolverReport::pogorelov_max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : stages) m = std::max(m, s.pogorelov_sup);
  return m;
}

void SolverReport::write_csv(std::ostream& os) const {
  os << "stage,t,newton_iter,residual_linf,A,min_eig,pogorelov_sup,alpha\n";
  char buf[512];
  for (const auto& r : iterations) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.stage, r.t,
                  r.newton_iter, r.residual_linf, r.A, r.min_eig, r.pogorelov_sup, r.alpha);
    os << buf;
  }
}

void SolverConfig::validate() const {
  if (!(tol_residual > 0.0 && tol_residual < 1.0)) throw Error("solver: tol must lie in (0, 1)");
  if (!(stage_tol > 0.0)) throw Error("solver: stage_tol must be positive");
  if (max_newton <= 0 || continuity_steps <= 0 || cg_max <= 0 || gmres_restart <= 0) {
    throw Error("solver: iteration limits must be positive");
  }
  if (!(eps_pos > 0.0) || !(cg_tol > 0.0)) throw Error("solver: eps_pos and cg_tol must be positive");
  if (!(damping > 0.0 && damping < 1.0) || !(min_step > 0.0 && min_step < 1.0)) {
    throw Error("solver: damping and min_step must lie in (0, 1)");
  }
}

void Problem::validate() const {
  require_same_grid(f.grid(), G0.grid(), "problem");
  f.require_finite("f");
  const GridMin m = grid_min_eig(G0);
  if (!(m.value > 0.0)) {
    throw NotPositiveDefinite("G0 is not positive definite at grid point " +
                              std::to_string(m.point));
  }
  Differentiator check(grid(), scheme);
}

Problem build_problem(ScalarField f, const HyperHermitian& c0, const TrigPoly& rho0,
                      Scheme scheme) {
  const Grid g = f.grid();
  if (c0.n() != g.n()) throw DimensionError("build_problem: C0 has the wrong size");
  Differentiator d(g, scheme);
  HermitianField G0 = hess_H(sample_trigpoly(rho0, g), d);
  G0 += HermitianField(g, c0);
  Problem p{std::move(f), std::move(G0), scheme};
  p.validate();
  return p;
}

double compute_A(const ScalarField& f, const HermitianField& G0, double t) {
  const ScalarField det = moore_det_field(G0);
  const ScalarField w = map(f, [t](double v) { return std::exp(t * v); });
  return integrate(det) / integrate(w, det);
}

void project_weighted_mean(ScalarField& phi, const ScalarField& weight) {
  const double shift = integrate(phi, weight) / integrate(weight);
  phi += -shift;
}

namespace {

void axpy(double alpha, const ScalarField& x, ScalarField& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

// Re Tr(A B) per point on raw records.
ScalarField trace_product_field(const HermitianField& a, const HermitianField& b) {
  const std::size_t n = a.n(), stride = a.stride();
  const auto ra = a.raw();
  const auto rb = b.raw();
  ScalarField out(a.grid());
  for_points(a.points(), exec::default_policy(), [&](std::size_t p) {
    const double* x = ra.data() + p * stride;
    const double* y = rb.data() + p * stride;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    double off = 0.0;
    for (std::size_t k = n; k < stride; ++k) off += x[k] * y[k];
    out[p] = s + 2.0 * off;
  });
  return out;
}

// det U * U^{-1} per point.
HermitianField adjugate_field(const HermitianField& u) {
  const std::size_t n = u.n();
  HermitianField out(u.grid());
  auto dst = out.raw();
  const auto src = u.raw();
  const std::size_t stride = u.stride();
  if (n == 1) {
    std::fill(dst.begin(), dst.end(), 1.0);
    return out;
  }
  if (n == 2) {
    for_points(u.points(), exec::default_policy(), [&](std::size_t p) {
      const double* s = src.data() + p * stride;
      double* d = dst.data() + p * stride;
      d[0] = s[1];
      d[1] = s[0];
      for (int c = 2; c < 6; ++c) d[c] = -s[c];
    });
    return out;
  }
  for (std::size_t p = 0; p < u.points(); ++p) {
    const HyperHermitian h = u.at(p);
    out.set(p, inverse(h) * moore_det(h));
  }
  return out;
}

// Sum over active axes of the second-derivative symbol of the scheme,
// evaluated for every Fourier index of the grid.
std::vector<double> laplacian_symbol(const Grid& g, Scheme scheme) {
  std::vector<std::vector<double>> axis(g.dim());
  for (std::size_t s : g.active_axes()) {
    const int n = g.size(s);
    const double h = g.spacing(s);
    axis[s].resize(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
      const int wave = (2 * m <= n) ? m : m - n;
      const double theta = 2.0 * std::numbers::pi * wave / n;
      double v = 0.0;
      switch (scheme) {
        case Scheme::spectral: {
          const double k = 2.0 * std::numbers::pi * wave / g.period(s);
          v = -k * k;
          break;
        }
        case Scheme::fd2: v = -(2.0 - 2.0 * std::cos(theta)) / (h * h); break;
        case Scheme::fd4:
          v = (-2.0 * std::cos(2.0 * theta) + 32.0 * std::cos(theta) - 30.0) / (12.0 * h * h);
          break;
      }
      axis[s][static_cast<std::size_t>(m)] = v;
    }
  }
  std::vector<double> out(g.points(), 0.0);
  for (std::size_t p = 0; p < g.points(); ++p)
    for (std::size_t s : g.active_axes())
      out[p] += axis[s][static_cast<std::size_t>(g.coord_index(p, s))];
  return out;
}

// Everything a solve at fixed problem data reuses.
struct Context {
  const Problem& problem;
  Scheme scheme;
  Differentiator diff;
  Spectral fourier;
  std::vector<double> symbol;
  ScalarField det_g0;

  Context(const Problem& p, Scheme s)
      : problem(p),
        scheme(s),
        diff(p.grid(), s),
        fourier(p.grid()),
        symbol(laplacian_symbol(p.grid(), s)),
        det_g0(moore_det_field(p.G0)) {}

  // x with (c * symbol) x = f; the constant mode of x is zero.
  ScalarField solve_laplacian(const ScalarField& f, double c) const {
    auto spec = fourier.forward(f);
    for (std::size_t q = 0; q < spec.size(); ++q)
      spec[q] = symbol[q] == 0.0 ? Spectral::Complex(0.0) : spec[q] / (c * symbol[q]);
    return fourier.inverse(std::move(spec));
  }

  HermitianField U(const ScalarField& phi) const {
    HermitianField u = hess_H(phi, diff);
    u += problem.G0;
    return u;
  }

  ScalarField rhs(double A, double t) const {
    ScalarField out(problem.grid());
    for (std::size_t p = 0; p < out.size(); ++p)
      out[p] = A * std::exp(t * problem.f[p]) * det_g0[p];
    return out;
  }
};

void require_positive(const HermitianField& u, double eps, GridMin* out = nullptr) {
  const GridMin m = grid_min_eig(u);
  if (out != nullptr) *out = m;
  if (!(m.value >= eps)) {
    throw PositivityLost("min eigenvalue " + std::to_string(m.value) + " below floor", m.point);
  }
}

ScalarField residual_of(const HermitianField& u, const ScalarField& rhs) {
  ScalarField r = moore_det_field(u);
  r -= rhs;
  return r;
}

// Right-preconditioned restarted GMRES.
template <class Op, class Prec>
Eigen::VectorXd gmres(Op&& apply, Prec&& precond, const Eigen::VectorXd& b, double tol,
                      int restart, int max_iter) {
  const Eigen::Index n = b.size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return x;
  int total = 0;
  while (total < max_iter) {
    const Eigen::VectorXd r = b - apply(precond(x));
    const double beta = r.norm();
    if (beta <= tol * bnorm) break;
    const int m = restart;
    Eigen::MatrixXd V(n, m + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m));
    V.col(0) = r / beta;
    g(0) = beta;
    int k = 0;
    bool done = false;
    for (int j = 0; j < m && total < max_iter; ++j, ++total) {
      Eigen::VectorXd w = apply(precond(V.col(j)));
      for (int i = 0; i <= j; ++i) {
        H(i, j) = w.dot(V.col(i));
        w -= H(i, j) * V.col(i);
      }
      H(j + 1, j) = w.norm();
      if (H(j + 1, j) > 0.0) V.col(j + 1) = w / H(j + 1, j);
      for (int i = 0; i < j; ++i) {
        const double a = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = a;
      }
      const double den = std::hypot(H(j, j), H(j + 1, j));
      cs[j] = H(j, j) / den;
      sn[j] = H(j + 1, j) / den;
      H(j, j) = den;
      H(j + 1, j) = 0.0;
      g(j + 1) = -sn[j] * g(j);
      g(j) = cs[j] * g(j);
      k = j + 1;
      if (std::fabs(g(j + 1)) <= tol * bnorm || H(j, j) == 0.0) {
        done = true;
        ++total;
        break;
      }
    }
    const Eigen::VectorXd y =
        H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    x += V.leftCols(k) * y;
    if (done) break;
  }
  return precond(x);
}

struct Step {
  ScalarField psi;
  double dA = 0.0;
};

// Exact trace-form Jacobian bordered by the unknown A and the weighted-mean
// constraint, solved with GMRES. The preconditioner inverts the constant-
// coefficient Laplacian of the scheme scaled by the mean adjugate trace.
Step newton_step(const Context& ctx, const HermitianField& u, const ScalarField& r, double t,
                  const SolverConfig& cfg, double eta) {
  const Grid& g = ctx.problem.grid();
  const std::size_t N = g.points();
  const HermitianField adj = adjugate_field(u);
  const ScalarField gt = ctx.rhs(1.0, t);
  const double wsum = exec::sum(ctx.det_g0.values());
  double c = 0.0;
  for (std::size_t p = 0; p < N; ++p)
    for (std::size_t i = 0; i < g.n(); ++i) c += adj.raw()[p * adj.stride() + i];
  c /= static_cast<double>(N * g.n());
  const double gmean = exec::sum(gt.values()) / static_cast<double>(N);

  auto split = [&](const Eigen::VectorXd& v) {
    ScalarField f(g);
    for (std::size_t p = 0; p < N; ++p) f[p] = v(static_cast<Eigen::Index>(p));
    return f;
  };
  auto apply = [&](const Eigen::VectorXd& v) {
    const ScalarField psi = split(v);
    const double dA = v(static_cast<Eigen::Index>(N));
    const ScalarField j = trace_product_field(adj, hess_H(psi, ctx.diff));
    Eigen::VectorXd out(static_cast<Eigen::Index>(N + 1));
    double wdot = 0.0;
    for (std::size_t p = 0; p < N; ++p) {
      out(static_cast<Eigen::Index>(p)) = j[p] - gt[p] * dA;
      wdot += ctx.det_g0[p] * psi[p];
    }
    out(static_cast<Eigen::Index>(N)) = wdot / wsum;
    return out;
  };
  auto precond = [&](const Eigen::VectorXd& v) {
    ScalarField r1 = split(v);
    const double r2 = v(static_cast<Eigen::Index>(N));
    double mean = 0.0;
    for (std::size_t p = 0; p < N; ++p) mean += r1[p];
    mean /= static_cast<double>(N);
    const double dA = -mean / gmean;
    for (std::size_t p = 0; p < N; ++p) r1[p] += gt[p] * dA;
    ScalarField psi = ctx.solve_laplacian(r1, c);
    double wdot = 0.0;
    for (std::size_t p = 0; p < N; ++p) wdot += ctx.det_g0[p] * psi[p];
    psi += r2 - wdot / wsum;
    Eigen::VectorXd out(static_cast<Eigen::Index>(N + 1));
    for (std::size_t p = 0; p < N; ++p) out(static_cast<Eigen::Index>(p)) = psi[p];
    out(static_cast<Eigen::Index>(N)) = dA;
    return out;
  };
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N + 1));
  for (std::size_t p = 0; p < N; ++p) b(static_cast<Eigen::Index>(p)) = -r[p];
  const Eigen::VectorXd x =
      gmres(apply, precond, b, std::max(cfg.cg_tol, eta), cfg.gmres_restart, cfg.cg_max);
  return {split(x), x(static_cast<Eigen::Index>(N))};
}

void record(SolverReport* report, int stage, const SolverState& s, int iter, double rnorm,
            double min_eig, const HermitianField& u, double alpha) {
  if (report == nullptr) return;
  report->iterations.push_back(
      {stage, s.t, iter, rnorm, s.A, min_eig, pogorelov_sup(u, s.phi), alpha});
}

NewtonResult newton_impl(const Context& ctx, SolverState& s, const SolverConfig& cfg,
                         double tol_abs, SolverReport* report, int stage) {
  HermitianField u = ctx.U(s.phi);
  GridMin gm;
  require_positive(u, cfg.eps_pos, &gm);
  ScalarField r = residual_of(u, ctx.rhs(s.A, s.t));
  double rnorm = r.max_abs();
  const double r0 = rnorm;
  record(report, stage, s, 0, rnorm, gm.value, u, 0.0);
  int iter = 0;
  while (rnorm > tol_abs) {
    if (iter >= cfg.max_newton) throw ConvergenceError("Newton did not reach tolerance", iter);
    ++iter;
    const double eta = std::min(1e-3, rnorm / std::max(r0, tol_abs));
    const Step step = newton_step(ctx, u, r, s.t, cfg, eta);
    const bool undamped = rnorm < 1e-3 * r0;
    double alpha = 1.0;
    bool positivity_failed = false;
    GridMin worst{};
    for (;;) {
      if (alpha < cfg.min_step) {
        if (positivity_failed) {
          throw PositivityLost("line search could not keep G0 + Hess phi positive", worst.point);
        }
        throw ConvergenceError("damping floor reached", iter);
      }
      ScalarField trial = s.phi;
      axpy(alpha, step.psi, trial);
      project_weighted_mean(trial, ctx.det_g0);
      const double trial_A = s.A + alpha * step.dA;
      HermitianField trial_u = ctx.U(trial);
      const GridMin tm = grid_min_eig(trial_u);
      if (tm.value >= cfg.eps_pos) {
        ScalarField trial_r = residual_of(trial_u, ctx.rhs(trial_A, s.t));
        const double trial_norm = trial_r.max_abs();
        if (undamped || trial_norm < rnorm) {
          s.phi = std::move(trial);
          s.A = trial_A;
          u = std::move(trial_u);
          r = std::move(trial_r);
          rnorm = trial_norm;
          gm = tm;
          break;
        }
        positivity_failed = false;
      } else {
        positivity_failed = true;
        worst = tm;
      }
      alpha *= cfg.damping;
    }
    record(report, stage, s, iter, rnorm, gm.value, u, alpha);
  }
  return {iter, rnorm, gm.value};
}

Scheme scheme_for(const Problem& p, const SolverConfig& cfg) { return cfg.scheme.value_or(p.scheme); }

double rhs_scale(const Context& ctx, double A, double t) { return ctx.rhs(A, t).max_abs(); }

// n = 1: det U = g + Lap phi, so each stage is one linear solve.
NewtonResult poisson_stage(const Context& ctx, SolverState& s, const SolverConfig& cfg,
                           SolverReport* report, int stage) {
  const Problem& pb = ctx.problem;
  s.A = compute_A(pb.f, pb.G0, s.t);
  ScalarField src = ctx.rhs(s.A, s.t);
  src -= ctx.det_g0;
  auto spec = ctx.fourier.forward(src);
  for (std::size_t q = 0; q < spec.size(); ++q)
    spec[q] = ctx.symbol[q] == 0.0 ? Spectral::Complex(0.0) : spec[q] / ctx.symbol[q];
  s.phi = ctx.fourier.inverse(std::move(spec));
  project_weighted_mean(s.phi, ctx.det_g0);
  const HermitianField u = ctx.U(s.phi);
  GridMin gm;
  require_positive(u, cfg.eps_pos, &gm);
  const double rnorm = residual_of(u, ctx.rhs(s.A, s.t)).max_abs();
  record(report, stage, s, 1, rnorm, gm.value, u, 1.0);
  return {1, rnorm, gm.value};
}

}  // namespace

HermitianField current_U(const SolverState& s, const Problem& p) {
  HermitianField u = hess_H(s.phi, Differentiator(p.grid(), p.scheme));
  u += p.G0;
  return u;
}

ScalarField residual(const SolverState& s, const Problem& p) {
  const HermitianField u = current_U(s, p);
  require_positive(u, 0.0);
  ScalarField rhs(p.grid());
  const ScalarField det0 = moore_det_field(p.G0);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = s.A * std::exp(s.t * p.f[i]) * det0[i];
  return residual_of(u, rhs);
}

ScalarField linearized_apply(const SolverState& s, const Problem& p, const ScalarField& psi,
                             DForm form) {
  const Differentiator d(p.grid(), p.scheme);
  HermitianField u = hess_H(s.phi, d);
  u += p.G0;
  return apply_D(u, psi, form, d);
}

double pogorelov_sup(const HermitianField& U, const ScalarField& phi) {
  const ScalarField tr = trace_field(U);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < tr.size(); ++p)
    best = std::max(best, 2.0 * std::sqrt(std::max(tr[p], 0.0)) - phi[p]);
  return best;
}

NewtonResult newton_solve(SolverState& s, const Problem& p, const SolverConfig& cfg,
                          double tol_abs, SolverReport* report, int stage) {
  cfg.validate();
  const Context ctx(p, scheme_for(p, cfg));
  if (p.grid().n() == 1) return poisson_stage(ctx, s, cfg, report, stage);
  project_weighted_mean(s.phi, ctx.det_g0);
  return newton_impl(ctx, s, cfg, tol_abs, report, stage);
}

SolveResult continuity_solve(const Problem& p, const SolverConfig& cfg,
                             const std::optional<ScalarField>& initial_phi) {
  cfg.validate();
  p.validate();
  const Context ctx(p, scheme_for(p, cfg));
  SolveResult out;
  SolverReport& report = out.report;
  SolverState s{initial_phi.value_or(ScalarField(p.grid())), 1.0, 0.0};
  require_same_grid(s.phi.grid(), p.grid(), "initial guess");
  project_weighted_mean(s.phi, ctx.det_g0);

  const double nominal = 1.0 / cfg.continuity_steps;
  double step = nominal;
  double t_next = 0.0;
  int stage = 0;
  SolveStatus last_failure = SolveStatus::no_convergence;
  std::string last_message;

  auto run_stage = [&](SolverState& st, bool final) {
    if (p.grid().n() == 1) return poisson_stage(ctx, st, cfg, &report, stage);
    st.A = compute_A(p.f, p.G0, st.t);
    const double rel = final ? cfg.tol_residual : std::max(cfg.stage_tol, cfg.tol_residual);
    return newton_impl(ctx, st, cfg, rel * rhs_scale(ctx, st.A, st.t), &report, stage);
  };

  for (;;) {
    SolverState trial = s;
    trial.t = t_next;
    const bool final = t_next >= 1.0;
    try {
      const NewtonResult nr = run_stage(trial, final);
      const HermitianField u = ctx.U(trial.phi);
      report.stages.push_back({stage, trial.t, nr.iterations, nr.residual_linf, trial.A,
                               nr.min_eig, pogorelov_sup(u, trial.phi), true});
      s = std::move(trial);
      ++stage;
      if (final) break;
      step = std::min(nominal, 2.0 * step);
      t_next = std::min(1.0, s.t + step);
      if (1.0 - t_next < 1e-12) t_next = 1.0;
      continue;
    } catch (const PositivityLost& e) {
      last_failure = SolveStatus::positivity_lost;
      last_message = e.what();
    } catch (const ConvergenceError& e) {
      last_failure = SolveStatus::no_convergence;
      last_message = e.what();
    }
    if (stage == 0 || p.grid().n() == 1) {
      report.status = last_failure;
      report.message = last_message;
      break;
    }
    step *= 0.5;
    if (step < nominal / 1024.0) {
      report.status = last_failure == SolveStatus::positivity_lost ? SolveStatus::positivity_lost
                                                                   : SolveStatus::stalled;
      report.message = "continuation stalled near t = " + std::to_string(s.t) + ": " + last_message;
      break;
    }
    t_next = s.t + step;
  }
  out.state = std::move(s);
  return out;
}

}  // namespace qma
