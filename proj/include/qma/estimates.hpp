#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qma/calculus.hpp"
#include "qma/deriv.hpp"
#include "qma/grid.hpp"
#include "qma/hherm.hpp"
#include "qma/trigpoly.hpp"

namespace qma {

/// Outcome of one check, oriented so that a nonnegative margin is a pass.
struct CheckReport {
  std::string check;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double margin = 0.0;
  double tol = 0.0;
  double scale = 1.0;
  /// Grid index or sample number of the worst margin.
  std::size_t worst_location = 0;
  bool pass = true;

  /// Folds another report of the same check into this one, keeping the worst
  /// margin relative to its tolerance.
  void absorb(const CheckReport& other, std::size_t location);
};

/// An empty (vacuously passing) report ready to absorb samples.
CheckReport empty_report(std::string name, std::uint64_t seed);

// ------------------------------------------------------------ random inputs

using Rng = std::mt19937_64;

Quaternion random_quaternion(Rng& rng, double amp = 1.0);
QuatMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double amp = 1.0);
HyperHermitian random_hyperhermitian(std::size_t n, Rng& rng, double amp = 1.0);
/// C* C + shift Id.
HyperHermitian random_positive(std::size_t n, Rng& rng, double shift = 0.1);
/// Quaternionic unitary from an eigendecomposition of a random matrix.
QuatMatrix random_unitary(std::size_t n, Rng& rng);
/// Unit n x 1 column.
QuatMatrix random_unit_vector(std::size_t n, Rng& rng);

// ------------------------------------------------------------ field inputs

/// U = c Id + Hess_H(rho) with c = 1.5 |min mineig Hess_H rho| + 1.
struct PositiveField {
  TrigPoly poly;
  ScalarField rho;
  HermitianField U;
  double c = 0.0;
};
PositiveField make_positive_field(const TrigPoly& rho, const Grid& g, Scheme scheme);

/// Smooth random potential on the active axes of g with frequencies up to
/// kmax and the given amplitude.
TrigPoly random_potential(const Grid& g, std::uint64_t seed, int kmax = 1, int terms = 6,
                          double amp = 0.02);

// ----------------------------------------------------------- matrix checks

/// Tr(A^{-1}(A-B)) <= n (det A)^{-1/n} ((det A)^{1/n} - (det B)^{1/n}).
CheckReport check_det_ineq(const HyperHermitian& a, const HyperHermitian& b);
/// det A Tr(A^{-1} B) = n det(A, ..., A, B).
CheckReport check_mixed_trace(const HyperHermitian& a, const HyperHermitian& b);
/// Tr(A^{-1} B A^{-1} B) = Tr(D^2) >= 0 through simultaneous diagonalization.
CheckReport check_trace_square(const HyperHermitian& a, const HyperHermitian& b);

// ------------------------------------------------------------ field checks

/// min over the grid of Tr(U^{-1} Delta_zeta U) - Delta_zeta log det U.
CheckReport check_dir_ineq(const HermitianField& U, const QuatMatrix& zeta, Scheme scheme);
/// min over the grid of Delta'(2 sqrt(Tr U)) - (Tr U)^{-1/2} Delta log det U.
CheckReport check_pogorelov(const HermitianField& U, Scheme scheme);
/// Third-derivative inequality at z after diagonalizing U(z) by a unitary.
/// U = c Id + Hess_H(rho) is evaluated analytically.
CheckReport check_third_deriv(const TrigPoly& rho, double c, std::size_t n,
                              std::span<const double> z, std::span<const double> periods,
                              double eps_pos = 1e-6);
/// max over t of |sum_s D_s a_st| / (1 + |a|) for a = realize(det U U^{-1}).
CheckReport check_divergence(const HermitianField& U, Scheme scheme);
/// Tr(U^{-1} U_ab) - Tr(U^{-1} U_a U^{-1} U_b) - (log F)_ab over all active
/// axis pairs, or only the given pair.
CheckReport check_logdet_identity(const HermitianField& U, Scheme scheme,
                                  std::optional<std::pair<std::size_t, std::size_t>> axes =
                                      std::nullopt);
/// Hess_H(u o A)(y) = A* Hess_H(u)(A y) A at the grid points, evaluated
/// analytically from the trigonometric polynomial.
CheckReport check_gl_transform(const TrigPoly& u, const Grid& g, const QuatMatrix& a);

/// Tolerance of check_divergence for the scheme on the grid.
double divergence_tolerance(const Grid& g, Scheme scheme);

/// A constructed potential for check_third_deriv: separable terms plus sine
/// terms that vanish to second order at z.
TrigPoly third_deriv_family(std::size_t n, std::span<const double> z,
                            std::span<const double> periods, std::uint64_t seed);

// ------------------------------------------------------------ suites

struct SuiteResult {
  std::vector<CheckReport> reports;

  bool pass() const;
  /// Columns check,seed,samples,margin,tol,pass.
  void write_csv(std::ostream& os) const;
  std::string summary_json() const;
};

SuiteResult run_algebra_suite(std::uint64_t seed, int trials);
SuiteResult run_calculus_suite(std::uint64_t seed, int trials);
SuiteResult run_estimates_suite(std::uint64_t seed, int trials);

}  // namespace qma
