#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "qma/errors.hpp"
#include "qma/estimates.hpp"
#include "qma/hherm.hpp"

using namespace qma;

namespace {

HyperHermitian diag(std::initializer_list<double> d) {
  return HyperHermitian::diagonal(std::vector<double>(d));
}

double rel(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300}); }

}  // namespace

TEST_CASE("storage reconstructs a hyperhermitian matrix") {
  std::mt19937_64 rng(1);
  const HyperHermitian h = random_hyperhermitian(4, rng);
  const QuatMatrix m = h.to_matrix();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(m(i, j) == m(j, i).conj());
  CHECK(max_abs_diff(HyperHermitian::from_matrix(m).to_matrix(), m) == 0.0);
  QuatMatrix bad = m;
  bad(0, 1) = bad(0, 1) + Quaternion(0, 1);
  CHECK_THROWS_AS(HyperHermitian::from_matrix(bad), DimensionError);
}

TEST_CASE("eig of a diagonal matrix") {
  const EigenDecomposition e = eig(diag({5, 2}));
  CHECK(e.eigenvalues[0] == doctest::Approx(2));
  CHECK(e.eigenvalues[1] == doctest::Approx(5));
  // Columns span the standard lines; the phase is arbitrary.
  CHECK(e.eigenvectors(1, 0).norm() == doctest::Approx(1));
  CHECK(e.eigenvectors(0, 1).norm() == doctest::Approx(1));
  CHECK(e.eigenvectors(0, 0).norm() < 1e-12);
}

TEST_CASE("eig of 2x2 against the characteristic polynomial") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    const HyperHermitian h = random_hyperhermitian(2, rng);
    const double a = h.diag()[0], b = h.diag()[1], q2 = h.upper()[0].norm2();
    const auto e = eig(h).eigenvalues;
    for (double mu : e) CHECK(std::fabs(mu * mu - (a + b) * mu + (a * b - q2)) < 1e-12);
    // The realization spectrum carries each value four times.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(realize(h));
    CHECK(es.eigenvalues()(0) == doctest::Approx(e[0]));
    CHECK(es.eigenvalues()(3) == doctest::Approx(e[0]));
    CHECK(es.eigenvalues()(4) == doctest::Approx(e[1]));
    CHECK(min_eig(h) == doctest::Approx(e[0]).epsilon(1e-12));
  }
}

TEST_CASE("eigenvectors are orthonormal and solve A xi = xi lambda") {
  std::mt19937_64 rng(3);
  for (std::size_t n = 1; n <= 4; ++n) {
    const HyperHermitian h = random_hyperhermitian(n, rng);
    const EigenDecomposition e = eig(h);
    const QuatMatrix& x = e.eigenvectors;
    CHECK(max_abs_diff(x.adjoint() * x, QuatMatrix::identity(n)) < 1e-10);
    for (std::size_t i = 0; i < n; ++i) {
      const QuatMatrix col = x.column(i);
      CHECK(max_abs_diff(h.to_matrix() * col, col * Quaternion(e.eigenvalues[i])) < 1e-10);
    }
    CHECK(std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end()));
    double prod = 1.0;
    for (double l : e.eigenvalues) prod *= l;
    CHECK(rel(prod, moore_det(h)) < 1e-10);
  }
}

TEST_CASE("eig handles a repeated eigenvalue") {
  std::mt19937_64 rng(4);
  const QuatMatrix u = random_unitary(3, rng);
  const HyperHermitian h = congruence(diag({2, 2, 7}), u);
  const EigenDecomposition e = eig(h);
  CHECK(e.eigenvalues[0] == doctest::Approx(2));
  CHECK(e.eigenvalues[1] == doctest::Approx(2));
  CHECK(max_abs_diff(e.eigenvectors.adjoint() * e.eigenvectors, QuatMatrix::identity(3)) < 1e-10);
}

TEST_CASE("Moore determinant examples") {
  CHECK(moore_det(HyperHermitian::identity(3)) == doctest::Approx(1));
  HyperHermitian h(2);
  h.set(0, 0, Quaternion(2));
  h.set(1, 1, Quaternion(3));
  h.set(0, 1, Quaternion(0, 1, 1, 0));
  CHECK(moore_det(h) == doctest::Approx(4).epsilon(1e-14));
  CHECK(moore_det_fast(h) == 4.0);
  CHECK(moore_det(diag({-1, 2})) == doctest::Approx(-2));
}

TEST_CASE("Moore determinant of an embedded complex hermitian matrix") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 100; ++k) {
    const auto n = static_cast<Eigen::Index>(1 + k % 4);
    Eigen::MatrixXcd c(n, n);
    HyperHermitian h(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      c(i, i) = u(rng);
      h.set(static_cast<std::size_t>(i), static_cast<std::size_t>(i), Quaternion(c(i, i).real()));
      for (Eigen::Index j = i + 1; j < n; ++j) {
        c(i, j) = {u(rng), u(rng)};
        c(j, i) = std::conj(c(i, j));
        h.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
              Quaternion(c(i, j).real(), c(i, j).imag()));
      }
    }
    const double want = c.determinant().real();
    CHECK(std::fabs(moore_det(h) - want) <= 1e-10 * std::max(1.0, std::fabs(want)));
  }
}

TEST_CASE("Moore determinant: sign, magnitude, homogeneity, positivity") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 4);
    const HyperHermitian h = random_hyperhermitian(n, rng);
    const double p = moore_det(h);
    CHECK(rel(std::fabs(p), std::pow(std::fabs(realize(h).determinant()), 0.25)) < 1e-9);
    CHECK(rel(moore_det_fast(h), p) < 1e-10);
    const double c = -1.7;
    CHECK(rel(moore_det(h * c), std::pow(c, static_cast<double>(n)) * p) < 1e-10);
    const HyperHermitian psd = congruence(HyperHermitian::identity(n), random_matrix(n, n, rng));
    CHECK(moore_det(psd) >= -1e-12);
  }
}

TEST_CASE("mixed determinant examples") {
  const std::vector<HyperHermitian> ab{diag({1, 2}), diag({3, 4})};
  CHECK(mixed_det(ab) == doctest::Approx(5).epsilon(1e-14));
  std::mt19937_64 rng(7);
  for (std::size_t n = 1; n <= 4; ++n) {
    const HyperHermitian a = random_hyperhermitian(n, rng);
    const std::vector<HyperHermitian> same(n, a);
    CHECK(std::fabs(mixed_det(same) - moore_det(a)) < 1e-10 * (1 + std::fabs(moore_det(a))));
  }
  CHECK_THROWS_AS(mixed_det(std::vector<HyperHermitian>{diag({1, 2})}), DimensionError);
}

TEST_CASE("mixed determinant: symmetry, multilinearity, positivity") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 60; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 3);
    std::vector<HyperHermitian> args;
    for (std::size_t i = 0; i < n; ++i) args.push_back(random_hyperhermitian(n, rng));
    const double base = mixed_det(args);
    std::vector<HyperHermitian> perm(args.rbegin(), args.rend());
    CHECK(std::fabs(mixed_det(perm) - base) < 1e-9 * (1 + std::fabs(base)));
    const double lam = 0.7, mu = -1.3;
    std::vector<HyperHermitian> other = args, combo = args;
    other[0] = random_hyperhermitian(n, rng);
    combo[0] = args[0] * lam + other[0] * mu;
    const double want = lam * base + mu * mixed_det(other);
    CHECK(std::fabs(mixed_det(combo) - want) < 1e-9 * (1 + std::fabs(want) + std::fabs(base)));
    std::vector<HyperHermitian> pos;
    for (std::size_t i = 0; i < n; ++i) pos.push_back(random_positive(n, rng));
    CHECK(mixed_det(pos) > 0.0);
  }
}

TEST_CASE("cholesky") {
  CHECK(max_abs_diff(cholesky(HyperHermitian::identity(3)), QuatMatrix::identity(3)) < 1e-15);
  const std::vector<double> d23{2, 3};
  CHECK(max_abs_diff(cholesky(diag({4, 9})), QuatMatrix::diagonal(d23)) < 1e-15);
  std::mt19937_64 rng(9);
  for (std::size_t n = 1; n <= 4; ++n) {
    const QuatMatrix c = random_matrix(n, n, rng);
    const HyperHermitian a = congruence(HyperHermitian::identity(n), c) + HyperHermitian::identity(n);
    const QuatMatrix t = cholesky(a);
    CHECK(max_abs_diff(t.adjoint() * t, a.to_matrix()) <= 1e-10 * a.max_abs());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(t(i, i).is_real());
      CHECK(t(i, i).w > 0);
      for (std::size_t j = 0; j < i; ++j) CHECK(t(i, j) == Quaternion());
    }
  }
  CHECK_THROWS_AS(cholesky(diag({1, -1})), NotPositiveDefinite);
}

TEST_CASE("simultaneous diagonalization") {
  const auto sd = simdiag(HyperHermitian::identity(3), diag({1, -2, 5}));
  CHECK(max_abs_diff(sd.t.adjoint() * sd.t, QuatMatrix::identity(3)) < 1e-12);
  std::vector<double> d = sd.d;
  std::sort(d.begin(), d.end());
  CHECK(d[0] == doctest::Approx(-2));
  CHECK(d[2] == doctest::Approx(5));

  std::mt19937_64 rng(10);
  for (std::size_t n = 1; n <= 4; ++n) {
    const HyperHermitian a = random_positive(n, rng), b = random_hyperhermitian(n, rng);
    const auto s = simdiag(a, b);
    const QuatMatrix dm = QuatMatrix::diagonal(s.d);
    CHECK(max_abs_diff(s.t.adjoint() * s.t, a.to_matrix()) < 1e-9 * (1 + a.max_abs()));
    CHECK(max_abs_diff(s.t.adjoint() * dm * s.t, b.to_matrix()) < 1e-9 * (1 + b.max_abs()));
    const auto same = simdiag(a, a);
    for (double v : same.d) CHECK(v == doctest::Approx(1).epsilon(1e-9));
    // Tr(A^-1 B A^-1 B) = Tr(D^2).
    const QuatMatrix ai = inverse(a.to_matrix());
    const double lhs = (ai * b.to_matrix() * ai * b.to_matrix()).trace();
    double rhs = 0.0;
    for (double v : s.d) rhs += v * v;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    CHECK(lhs >= 0.0);
  }
  CHECK_THROWS_AS(simdiag(diag({1, -1}), diag({1, 1})), NotPositiveDefinite);
}

TEST_CASE("rank-one decomposition") {
  const auto id = rank_one_decomp(HyperHermitian::identity(3), 1, 1);
  REQUIRE(id.vectors.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(id.weights[k] == doctest::Approx(1));
    CHECK(inner(id.vectors[k], id.vectors[k]).w == doctest::Approx(1));
  }
  CHECK(max_abs_diff(id.reconstruct().to_matrix(), QuatMatrix::identity(3)) < 1e-12);

  std::mt19937_64 rng(11);
  for (std::size_t n = 1; n <= 4; ++n) {
    std::uniform_real_distribution<double> spec(0.5, 2.0);
    std::vector<double> d(n);
    for (double& v : d) v = spec(rng);
    const HyperHermitian a = congruence(HyperHermitian::diagonal(d), random_unitary(n, rng));
    const auto r = rank_one_decomp(a, 0.5, 2.0);
    CHECK(max_abs_diff(r.reconstruct().to_matrix(), a.to_matrix()) <= 1e-9 * a.max_abs());
    for (double b : r.weights) {
      CHECK(b >= 0.5 - 1e-12);
      CHECK(b <= 2.0 + 1e-12);
    }
    for (const auto& z : r.vectors) CHECK(inner(z, z).w == doctest::Approx(1).epsilon(1e-12));
  }
  CHECK_THROWS_AS(rank_one_decomp(diag({0.1, 1}), 0.5, 2.0), DimensionError);
}

TEST_CASE("hyperhermitian inverse and trace product") {
  std::mt19937_64 rng(12);
  for (std::size_t n = 1; n <= 4; ++n) {
    const HyperHermitian a = random_positive(n, rng);
    CHECK(max_abs_diff(inverse(a).to_matrix() * a.to_matrix(), QuatMatrix::identity(n)) < 1e-10);
    const HyperHermitian b = random_hyperhermitian(n, rng);
    CHECK(trace_product(a, b) == doctest::Approx((a.to_matrix() * b.to_matrix()).trace()));
  }
}
