#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "qma/errors.hpp"
#include "qma/estimates.hpp"

using namespace qma;

namespace {

const Grid kCube(2, {8, 8, 8, 8, 1, 1, 1, 1});
const Grid kMixed(2, {8, 8, 1, 1, 8, 8, 1, 1});

HyperHermitian diag(std::initializer_list<double> d) {
  return HyperHermitian::diagonal(std::vector<double>(d));
}

QuatMatrix basis(std::size_t n, std::size_t i) {
  QuatMatrix e(n, 1);
  e(i, 0) = Quaternion(1);
  return e;
}

}  // namespace

TEST_CASE("determinant inequality") {
  CHECK(check_det_ineq(diag({1, 4}), diag({1, 4})).margin == doctest::Approx(0).scale(1));
  const CheckReport r = check_det_ineq(diag({1, 4}), diag({2, 2}));
  CHECK(r.margin == doctest::Approx(0.5));
  CHECK(r.pass);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 4);
    const CheckReport c = check_det_ineq(random_positive(n, rng), random_positive(n, rng));
    CHECK(c.margin >= -1e-10 * c.scale);
  }
  CHECK_THROWS_AS(check_det_ineq(diag({1, -1}), diag({1, 1})), NotPositiveDefinite);
}

TEST_CASE("mixed trace identity") {
  std::mt19937_64 rng(2);
  for (std::size_t n = 1; n <= 4; ++n) {
    const HyperHermitian a = random_positive(n, rng);
    std::vector<HyperHermitian> same(n, a);
    CHECK(check_mixed_trace(a, a).pass);
    const HyperHermitian b = random_hyperhermitian(n, rng);
    std::vector<HyperHermitian> args(n, HyperHermitian::identity(n));
    args.back() = b;
    CHECK(b.trace() == doctest::Approx(static_cast<double>(n) * mixed_det(args)).epsilon(1e-10));
    const CheckReport c = check_mixed_trace(a, b);
    CHECK(c.margin >= -c.tol);
  }
}

TEST_CASE("trace of a square through simultaneous diagonalization") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 4);
    const CheckReport c = check_trace_square(random_positive(n, rng), random_hyperhermitian(n, rng));
    CHECK(c.margin >= -1e-10 * c.scale);
  }
}

TEST_CASE("directional inequality") {
  const HermitianField constant(kMixed, HyperHermitian::identity(2, 3.0));
  const CheckReport flat = check_dir_ineq(constant, basis(2, 0), Scheme::spectral);
  CHECK(std::fabs(flat.margin) < 1e-12);
  const PositiveField pf = make_positive_field(random_potential(kMixed, 42), kMixed, Scheme::spectral);
  CHECK(check_dir_ineq(pf.U, basis(2, 0), Scheme::spectral).pass);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 4; ++k) CHECK(check_dir_ineq(pf.U, random_unit_vector(2, rng), Scheme::spectral).pass);
  CHECK_THROWS(check_dir_ineq(pf.U, basis(2, 0) * 2.0, Scheme::spectral));
  CHECK_THROWS(check_dir_ineq(HermitianField(kMixed, diag({1, -1})), basis(2, 0), Scheme::spectral));
}

TEST_CASE("Pogorelov-type inequality") {
  const HermitianField constant(kCube, HyperHermitian::identity(2, 2.0));
  CHECK(std::fabs(check_pogorelov(constant, Scheme::spectral).margin) < 1e-12);
  for (std::uint64_t seed : {1, 2, 3}) {
    const PositiveField pf = make_positive_field(random_potential(kCube, seed), kCube, Scheme::spectral);
    const CheckReport r = check_pogorelov(pf.U, Scheme::spectral);
    CHECK(r.pass);
    HermitianField scaled = pf.U;
    scaled *= 5.0;
    const CheckReport s = check_pogorelov(scaled, Scheme::spectral);
    // Both sides scale by c^{-1/2}.
    CHECK(s.margin == doctest::Approx(r.margin / std::sqrt(5.0)).epsilon(1e-6));
  }
  const PositiveField pm = make_positive_field(random_potential(kMixed, 9), kMixed, Scheme::spectral);
  CHECK(check_pogorelov(pm.U, Scheme::spectral).pass);
}

TEST_CASE("third-derivative inequality") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(0, 1);
  for (std::size_t n : {1, 2, 3}) {
    std::vector<double> z(4 * n), periods(4 * n, 1.0);
    for (double& v : z) v = coord(rng);
    // Separable potential: one term per variable.
    TrigPoly sep;
    for (std::size_t i = 0; i < n; ++i) {
      TrigTerm t;
      t.k.assign(4 * n, 0);
      t.k[4 * i] = 1;
      t.k[4 * i + 2] = -1;
      t.cos = 0.004;
      t.sin = 0.002;
      sep.add(t);
    }
    CHECK(check_third_deriv(sep, 1.0, n, z, periods).pass);
    const TrigPoly fam = third_deriv_family(n, z, periods, 10 + n);
    const CheckReport r = check_third_deriv(fam, 1.0, n, z, periods);
    CHECK(r.pass);
    if (n == 1) CHECK(r.margin >= 0.0);
  }
  SUBCASE("the constructed family has vanishing extra Hessian at z") {
    std::vector<double> z{0.1, 0.2, 0.3, 0.4}, periods(4, 1.0);
    const TrigPoly fam = third_deriv_family(1, z, periods, 3);
    TrigPoly extra(std::vector<TrigTerm>(fam.terms().begin() + 2, fam.terms().end()));
    CHECK(extra.hessian(z, periods).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(extra.third(z, periods)[0].cwiseAbs().maxCoeff() +
              extra.third(z, periods)[1].cwiseAbs().maxCoeff() >
          1e-6);
  }
}

TEST_CASE("divergence-free coefficients") {
  const Grid g1(1, {8, 8, 8, 8});
  const PositiveField p1 = make_positive_field(random_potential(g1, 1), g1, Scheme::spectral);
  CHECK(check_divergence(p1.U, Scheme::spectral).margin == 0.0);
  const Grid slice(2, {8, 1, 1, 1, 8, 1, 1, 1});
  const std::vector<std::size_t> reals{0, 4};
  const PositiveField ps =
      make_positive_field(TrigPoly::random(8, reals, 1, 4, 0.02, 2), slice, Scheme::spectral);
  CHECK(check_divergence(ps.U, Scheme::spectral).pass);
  const PositiveField pm = make_positive_field(random_potential(kMixed, 3), kMixed, Scheme::spectral);
  const CheckReport r = check_divergence(pm.U, Scheme::spectral);
  CHECK(r.pass);
  CHECK(r.tol == 1e-7);
}

TEST_CASE("log-determinant identity") {
  const HermitianField constant(kMixed, HyperHermitian::identity(2, 2.0));
  CHECK(std::fabs(check_logdet_identity(constant, Scheme::spectral).margin) < 1e-12);
  const Grid g1(1, {16, 1, 1, 1});
  const std::vector<std::size_t> ax{0};
  const PositiveField p1 = make_positive_field(TrigPoly::random(4, ax, 2, 3, 0.01, 4), g1, Scheme::spectral);
  CHECK(check_logdet_identity(p1.U, Scheme::spectral).pass);
  const PositiveField pm = make_positive_field(random_potential(kMixed, 5), kMixed, Scheme::spectral);
  CHECK(check_logdet_identity(pm.U, Scheme::spectral).pass);
  CHECK(check_logdet_identity(pm.U, Scheme::spectral, std::pair<std::size_t, std::size_t>{0, 5}).pass);
}

TEST_CASE("GL-transform covariance") {
  const TrigPoly u = random_potential(kMixed, 6, 1, 6, 1.0);
  CHECK(check_gl_transform(u, kMixed, QuatMatrix::identity(2)).margin > -1e-13);
  QuatMatrix swap(2, 2);
  swap(0, 1) = Quaternion(1);
  swap(1, 0) = Quaternion(1);
  CHECK(check_gl_transform(u, kMixed, swap).pass);
  QuatMatrix phase = QuatMatrix::identity(2);
  const double s = 1.0 / std::sqrt(30.0);
  phase(0, 0) = Quaternion(1 * s, 2 * s, 3 * s, 4 * s);
  CHECK(check_gl_transform(u, kMixed, phase).pass);
  std::mt19937_64 rng(7);
  CHECK(check_gl_transform(u, kMixed, random_unitary(2, rng)).pass);
  CHECK_THROWS(check_gl_transform(u, kMixed, QuatMatrix::identity(2) * 2.0));
}

TEST_CASE("report folding keeps the worst sample") {
  CheckReport r = empty_report("x", 9);
  CHECK(r.pass);
  CHECK(r.samples == 0);
  CheckReport a;
  a.samples = 1, a.margin = -1e-12, a.tol = 1e-10, a.pass = true;
  CheckReport b;
  b.samples = 2, b.margin = -5e-11, b.tol = 1e-10, b.pass = true;
  r.absorb(a, 3);
  r.absorb(b, 4);
  CHECK(r.samples == 3);
  CHECK(r.margin == -5e-11);
  CHECK(r.worst_location == 4);
  CHECK(r.pass);
}

TEST_CASE("suites are reproducible and report in CSV") {
  const auto run = [] {
    std::ostringstream os;
    run_algebra_suite(42, 20).write_csv(os);
    run_calculus_suite(42, 1).write_csv(os);
    run_estimates_suite(42, 20).write_csv(os);
    return os.str();
  };
  const std::string a = run();
  CHECK(a == run());
  CHECK(a.rfind("check,seed,samples,margin,tol,pass\n", 0) == 0);
  const SuiteResult empty = run_estimates_suite(1, 0);
  CHECK(empty.pass());
  for (const auto& r : empty.reports) CHECK(r.samples == 0);
  const SuiteResult alg = run_algebra_suite(42, 50);
  CHECK(alg.pass());
  CHECK(alg.summary_json().find("\"pass\": true") != std::string::npos);
}
