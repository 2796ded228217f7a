// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qma/calculus.hpp"
#include "qma/estimates.hpp"
#include "qma/exec.hpp"
#include "qma/problem_config.hpp"
#include "qma/qmaf.hpp"
#include "qma/solver.hpp"

using namespace qma;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Bytes = std::vector<std::uint8_t>;

// Outputs of the solver runs, keyed by run name, for the determinism check.
std::map<std::string, Bytes> g_artifacts;
// Pogorelov monitor of every accepted path: (name, report).
std::vector<std::pair<std::string, SolverReport>> g_paths;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel_defect(double got, double want) {
  const double s = std::max(std::fabs(got), std::fabs(want));
  return s == 0.0 ? 0.0 : std::fabs(got - want) / s;
}

Bytes artifact(const SolveResult& r) {
  std::ostringstream csv;
  r.report.write_csv(csv);
  const std::string text = csv.str();
  Bytes out(text.begin(), text.end());
  const Bytes phi = qmaf::encode(r.state.phi);
  out.insert(out.end(), phi.begin(), phi.end());
  return out;
}

double mean(const ScalarField& f) {
  return std::accumulate(f.values().begin(), f.values().end(), 0.0) / static_cast<double>(f.size());
}

// sup |a - b - mean(a - b)|.
double sup_diff_mod_const(const ScalarField& a, const ScalarField& b) {
  ScalarField d = a - b;
  d += -mean(d);
  return d.max_abs();
}

// ------------------------------------------------------------------ 1

Outcome moore_determinant_suite() {
  std::mt19937_64 rng(20240101);
  double congr = 0, real4 = 0, cplx = 0, closed = 0;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 4);
    const HyperHermitian a = random_hyperhermitian(n, rng);
    const QuatMatrix c = random_matrix(n, n, rng);
    const double da = moore_det(a);
    const HyperHermitian cc = HyperHermitian::from_matrix(c.adjoint() * c);
    congr = std::max(congr, rel_defect(moore_det(congruence(a, c)), da * moore_det(cc)));
    const double dr = oracle::realize(a.to_matrix()).determinant();
    real4 = std::max(real4, rel_defect(dr, std::pow(da, 4)));

    Eigen::MatrixXcd h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      h(i, i) = u(rng);
      for (Eigen::Index j = i + 1; j < h.cols(); ++j) {
        h(i, j) = {u(rng), u(rng)};
        h(j, i) = std::conj(h(i, j));
      }
    }
    cplx = std::max(cplx, rel_defect(moore_det(oracle::embed(h)), oracle::complex_det(h)));

    const HyperHermitian two = random_hyperhermitian(2, rng);
    const double ab_q = two.diag()[0] * two.diag()[1] - two.upper()[0].norm2();
    closed = std::max({closed, rel_defect(moore_det(two), ab_q), rel_defect(moore_det_fast(two), ab_q)});
  }
  Outcome o;
  o.pass = congr <= 1e-9 && real4 <= 1e-8 && cplx <= 1e-10 && closed <= 1e-12;
  o.detail = "congruence " + fmt("%.2e", congr) + ", realization " + fmt("%.2e", real4) +
             ", complex " + fmt("%.2e", cplx) + ", 2x2 " + fmt("%.2e", closed);
  return o;
}

// ------------------------------------------------------------------ 2

Outcome mixed_determinant_suite() {
  double sym = 0, lin = 0, diag = 0, polar = 0, min_pos = INFINITY;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 1 + seed % 3;
    std::vector<HyperHermitian> args;
    for (std::size_t i = 0; i < n; ++i) args.push_back(random_hyperhermitian(n, rng));
    const double base = mixed_det(args);
    const double scale = std::fabs(base) + 1.0;
    polar = std::max(polar, std::fabs(base - oracle::mixed_det_polarized(args)) / scale);

    std::vector<HyperHermitian> perm = args;
    std::shuffle(perm.begin(), perm.end(), rng);
    sym = std::max(sym, std::fabs(mixed_det(perm) - base) / scale);

    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    const double lam = coef(rng), mu = coef(rng);
    const std::size_t slot = rng() % n;
    std::vector<HyperHermitian> other = args, combo = args;
    other[slot] = random_hyperhermitian(n, rng);
    combo[slot] = args[slot] * lam + other[slot] * mu;
    const double want = lam * base + mu * mixed_det(other);
    lin = std::max(lin, std::fabs(mixed_det(combo) - want) /
                            (std::fabs(lam * base) + std::fabs(want) + 1.0));

    const std::vector<HyperHermitian> same(n, args[0]);
    diag = std::max(diag, std::fabs(mixed_det(same) - moore_det(args[0])) /
                              (std::fabs(moore_det(args[0])) + 1.0));

    std::vector<HyperHermitian> pos;
    for (std::size_t i = 0; i < n; ++i) pos.push_back(random_positive(n, rng));
    min_pos = std::min(min_pos, mixed_det(pos));
  }
  Outcome o;
  o.pass = sym <= 1e-9 && lin <= 1e-9 && diag <= 1e-9 && polar <= 1e-9 && min_pos > 0.0;
  o.detail = "symmetry " + fmt("%.2e", sym) + ", multilinear " + fmt("%.2e", lin) + ", diagonal " +
             fmt("%.2e", diag) + ", polarization " + fmt("%.2e", polar) + ", min positive " +
             fmt("%.3g", min_pos);
  return o;
}

// ------------------------------------------------------------------ 3, 4

Outcome suite_outcome(const SuiteResult& r, const std::map<std::string, double>& pinned) {
  Outcome o;
  for (const auto& rep : r.reports) {
    const auto it = pinned.find(rep.check);
    if (it == pinned.end()) continue;
    // Pass requires margin >= -pinned * scale regardless of the report's own tolerance.
    const bool ok = rep.pass && rep.margin >= -it->second * rep.scale && rep.samples > 0;
    o.pass = o.pass && ok;
    if (!o.detail.empty()) o.detail += ", ";
    o.detail += rep.check + " " + fmt("%.2e", rep.margin / rep.scale) + (ok ? "" : "!");
  }
  for (const auto& [name, tol] : pinned) {
    const bool present = std::any_of(r.reports.begin(), r.reports.end(),
                                     [&](const CheckReport& c) { return c.check == name; });
    if (!present) {
      o.pass = false;
      o.detail += ", missing " + name;
    }
  }
  return o;
}

Outcome calculus_suite() {
  const SuiteResult r = run_calculus_suite(3, 4);
  return suite_outcome(r, {{"hessian_symmetry", 1e-11},
                           {"real_slice", 1e-10},
                           {"gl_transform", 1e-8},
                           {"logdet_identity", 1e-7},
                           {"divergence", 1e-7},
                           {"self_adjoint", 1e-8}});
}

Outcome inequality_suite() {
  const SuiteResult r = run_estimates_suite(7, 500);
  Outcome o = suite_outcome(r, {{"det_ineq", 1e-10},
                                {"mixed_trace", 1e-9},
                                {"dir_ineq", 1e-5},
                                {"pogorelov", 1e-5},
                                {"third_deriv", 1e-6}});
  const std::map<std::string, std::size_t> counts{{"det_ineq", 500}, {"mixed_trace", 500}, {"third_deriv", 20}};
  for (const auto& rep : r.reports) {
    const auto it = counts.find(rep.check);
    if (it != counts.end() && rep.samples < it->second) {
      o.pass = false;
      o.detail += ", too few samples for " + rep.check;
    }
  }
  return o;
}

// ------------------------------------------------------------------ 5

struct PoissonCase {
  Problem problem;
  TrigPoly rho;
  double c = 0.0;
};

PoissonCase poisson_case() {
  const Grid g(1, {16, 16, 16, 16});
  const std::vector<std::size_t> axes{0, 1, 2, 3};
  PoissonCase pc;
  pc.rho = TrigPoly::random(4, axes, 1, 3, 0.004, 0);
  TrigTerm ft;
  ft.k = {1, 0, 0, 0};
  ft.cos = 0.3;
  const ScalarField f = sample_trigpoly(TrigPoly({ft}), g);
  const auto lap = oracle::trig_laplacian(pc.rho, g);
  const double low = *std::min_element(lap.begin(), lap.end());
  pc.c = 1.5 * std::fabs(low) + 1.0;
  pc.problem = build_problem(f, HyperHermitian::identity(1, pc.c), pc.rho, Scheme::spectral);
  return pc;
}

SolveResult run_poisson(const PoissonCase& pc) {
  SolverConfig cfg;
  cfg.scheme = Scheme::spectral;
  return continuity_solve(pc.problem, cfg);
}

Outcome poisson_solve() {
  const PoissonCase pc = poisson_case();
  const Grid& g = pc.problem.grid();
  const SolveResult r = run_poisson(pc);
  g_artifacts["poisson"] = artifact(r);
  Outcome o;
  if (!r.report.ok()) return {false, "solver: " + r.report.message};
  g_paths.emplace_back("poisson", r.report);

  // g = c + Laplacian rho, A = int g / int e^f g, then Laplacian phi = A e^f g - g.
  const auto lap = oracle::trig_laplacian(pc.rho, g);
  const auto fv = oracle::trig_values(TrigPoly({TrigTerm{{1, 0, 0, 0}, 0.3, 0.0}}), g);
  double ig = 0.0, ieg = 0.0;
  std::vector<double> gw(g.points());
  for (std::size_t q = 0; q < g.points(); ++q) {
    gw[q] = pc.c + lap[q];
    ig += gw[q];
    ieg += std::exp(fv[q]) * gw[q];
  }
  const double A = ig / ieg;
  std::vector<double> rhs(g.points());
  for (std::size_t q = 0; q < g.points(); ++q) rhs[q] = A * std::exp(fv[q]) * gw[q] - gw[q];
  auto phi = oracle::poisson(rhs, g);
  double wm = 0.0;
  for (std::size_t q = 0; q < g.points(); ++q) wm += phi[q] * gw[q];
  wm /= ig;
  double err = 0.0;
  for (std::size_t q = 0; q < g.points(); ++q)
    err = std::max(err, std::fabs(phi[q] - wm - r.state.phi[q]));
  const double aerr = std::fabs(r.state.A - A);
  o.pass = err <= 1e-8 && aerr <= 1e-10;
  o.detail = "sup error " + fmt("%.2e", err) + ", |A - A_oracle| " + fmt("%.2e", aerr);
  return o;
}

// ------------------------------------------------------------------ 6, 7

struct ManufacturedCase {
  Problem problem;
  TrigPoly phi_star;
};

ManufacturedCase manufactured_case(int size, Scheme s, bool continuum) {
  const Grid g(2, {size, size, 1, 1, size, size, 1, 1});
  const std::vector<std::size_t> axes{0, 1, 4, 5};
  const TrigPoly rho = TrigPoly::random(8, axes, 1, 4, 0.005, 5);
  const TrigPoly phi = TrigPoly::random(8, axes, 1, 4, 0.004, 6);
  double c = 0.0;
  positive_hessian_field(sample_trigpoly(rho, g), Differentiator(g, s), &c);
  const HyperHermitian c0 = HyperHermitian::identity(2, c);
  const ScalarField f = manufactured_f(g, c0, rho, phi, s, continuum);
  return {build_problem(f, c0, rho, s), phi};
}

SolveResult run_manufactured(const ManufacturedCase& mc,
                             const std::optional<ScalarField>& init = std::nullopt) {
  SolverConfig cfg;
  cfg.scheme = mc.problem.scheme;
  return continuity_solve(mc.problem, cfg, init);
}

Outcome manufactured_solve() {
  Outcome o;
  const ManufacturedCase mc = manufactured_case(8, Scheme::spectral, false);
  const SolveResult r = run_manufactured(mc);
  g_artifacts["manufactured_spectral"] = artifact(r);
  if (!r.report.ok()) return {false, "spectral solver: " + r.report.message};
  g_paths.emplace_back("manufactured_spectral", r.report);
  const ScalarField star = sample_trigpoly(mc.phi_star, mc.problem.grid());
  const double rel = sup_diff_mod_const(r.state.phi, star) / star.max_abs();
  o.detail = "spectral relative error " + fmt("%.2e", rel);
  o.pass = rel <= 1e-6;

  std::vector<double> errs;
  for (int size : {8, 16}) {
    const ManufacturedCase fc = manufactured_case(size, Scheme::fd2, true);
    const SolveResult fr = run_manufactured(fc);
    g_artifacts["manufactured_fd2_" + std::to_string(size)] = artifact(fr);
    if (!fr.report.ok()) return {false, "fd2 solver (size " + std::to_string(size) + "): " + fr.report.message};
    g_paths.emplace_back("manufactured_fd2_" + std::to_string(size), fr.report);
    errs.push_back(sup_diff_mod_const(fr.state.phi, sample_trigpoly(fc.phi_star, fc.problem.grid())));
  }
  const double order = std::log2(errs[0] / errs[1]);
  o.pass = o.pass && std::fabs(order - 2.0) <= 0.3;
  o.detail += ", fd2 errors " + fmt("%.3e", errs[0]) + " -> " + fmt("%.3e", errs[1]) + ", order " +
              fmt("%.3f", order);
  return o;
}

Outcome uniqueness() {
  const ManufacturedCase mc = manufactured_case(8, Scheme::spectral, false);
  const Grid& g = mc.problem.grid();
  const SolveResult a = run_manufactured(mc);
  const std::vector<std::size_t> axes{0, 1, 4, 5};
  const ScalarField init = sample_trigpoly(TrigPoly::random(8, axes, 1, 5, 0.002, 99), g);
  const SolveResult b = run_manufactured(mc, init);
  g_artifacts["uniqueness_b"] = artifact(b);
  if (!a.report.ok() || !b.report.ok()) return {false, "solver: " + a.report.message + b.report.message};
  ScalarField pa = a.state.phi, pb = b.state.phi;
  pa += -mean(pa);
  pb += -mean(pb);
  const double d = (pa - pb).max_abs();
  return {d <= 1e-7, "sup difference " + fmt("%.2e", d)};
}

// ------------------------------------------------------------------ 8

Outcome laplacian_bound() {
  Outcome o;
  if (g_paths.empty()) return {false, "no accepted paths"};
  for (const auto& [name, rep] : g_paths) {
    const double start = rep.stages.front().pogorelov_sup;
    bool finite = std::isfinite(start);
    for (const auto& s : rep.stages) finite = finite && std::isfinite(s.pogorelov_sup);
    const double ratio = rep.pogorelov_max() / start;
    const bool ok = finite && rep.stages.front().t == 0.0 && start > 0.0 && ratio < 10.0;
    o.pass = o.pass && ok;
    if (!o.detail.empty()) o.detail += ", ";
    o.detail += name + " " + fmt("%.4f", ratio) + (ok ? "" : "!");
  }
  return o;
}

// ------------------------------------------------------------------ 9

Outcome determinism() {
  Outcome o;
  std::map<std::string, Bytes> again;
  again["poisson"] = artifact(run_poisson(poisson_case()));
  again["manufactured_spectral"] = artifact(run_manufactured(manufactured_case(8, Scheme::spectral, false)));
  for (int size : {8, 16})
    again["manufactured_fd2_" + std::to_string(size)] =
        artifact(run_manufactured(manufactured_case(size, Scheme::fd2, true)));
  for (const auto& [name, bytes] : again) {
    const auto it = g_artifacts.find(name);
    const bool same = it != g_artifacts.end() && it->second == bytes;
    o.pass = o.pass && same;
    if (!o.detail.empty()) o.detail += ", ";
    o.detail += name + (same ? " identical" : " DIFFERS");
  }
  auto suites = [] {
    std::ostringstream os;
    run_algebra_suite(42, 100).write_csv(os);
    run_calculus_suite(42, 2).write_csv(os);
    run_estimates_suite(42, 50).write_csv(os);
    return os.str();
  };
  const bool same_csv = suites() == suites();
  o.pass = o.pass && same_csv;
  o.detail += same_csv ? ", check CSV identical" : ", check CSV DIFFERS";
  return o;
}

}  // namespace

int main() {
  exec::set_deterministic(true);
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Moore determinant suite", 10, moore_determinant_suite},
      {2, "mixed determinant suite", 30, mixed_determinant_suite},
      {3, "calculus identity suite", 120, calculus_suite},
      {4, "inequality suite", 300, inequality_suite},
      {5, "n=1 linear solve", 30, poisson_solve},
      {6, "manufactured n=2 solve", 300, manufactured_solve},
      {7, "uniqueness up to a constant", 0, uniqueness},
      {8, "Laplacian-bound monitoring", 0, laplacian_bound},
      {9, "determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs > c.limit_s) {
      o.pass = false;
      o.detail += ", over time limit";
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d: %s  %s (%s; %.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
