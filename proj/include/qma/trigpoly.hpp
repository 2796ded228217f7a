#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qma/grid.hpp"

namespace qma {

/// One term a cos(2 pi k.x / L) + b sin(2 pi k.x / L), where k.x/L means
/// sum_s k_s x_s / L_s.
struct TrigTerm {
  std::vector<int> k;
  double cos = 0.0;
  double sin = 0.0;
};

/// Finite trigonometric polynomial on R^{4n}. Periods are taken from the grid
/// (or passed explicitly) at evaluation time.
class TrigPoly {
 public:
  TrigPoly() = default;
  explicit TrigPoly(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {}

  std::span<const TrigTerm> terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  void add(TrigTerm t) { terms_.push_back(std::move(t)); }

  double value(std::span<const double> x, std::span<const double> periods) const;
  /// Real Hessian d^2 / dx_s dx_t.
  Eigen::MatrixXd hessian(std::span<const double> x, std::span<const double> periods) const;
  /// Third derivative d^3 / dx_a dx_s dx_t, as 4n matrices indexed by a.
  std::vector<Eigen::MatrixXd> third(std::span<const double> x,
                                     std::span<const double> periods) const;

  /// Throws AliasingError naming the first term with |k_s| > N_s/2.
  void check_aliasing(const Grid& g) const;

  /// Random polynomial: `count` terms with frequencies in {-kmax..kmax} on the
  /// listed axes (zero elsewhere) and coefficients uniform in [-amp, amp].
  static TrigPoly random(std::size_t dim, std::span<const std::size_t> axes, int kmax,
                         int count, double amp, std::uint64_t seed);

 private:
  std::vector<TrigTerm> terms_;
};

/// Pointwise evaluation on the grid after the aliasing guard.
ScalarField sample_trigpoly(const TrigPoly& p, const Grid& g);

}  // namespace qma
