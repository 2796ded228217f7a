#pragma once

#include <span>

#include <Eigen/Dense>

#include "qma/deriv.hpp"
#include "qma/exec.hpp"
#include "qma/grid.hpp"
#include "qma/hherm.hpp"
#include "qma/trigpoly.hpp"

namespace qma {

/// Quaternionic Hessian built from a real 4n x 4n Hessian:
/// entry (i, j) = sum_{p,r} e_p conj(e_r) d^2 u / dx_{4i+p} dx_{4j+r},
/// i.e. d^2 u / (d qbar_i d q_j) with the Dirac operators acting on the left
/// (qbar) and on the right (q).
HyperHermitian quaternionic_hessian(const Eigen::MatrixXd& real_hessian, std::size_t n);

/// Hess_H u on the grid with the differentiator's scheme. Diagonal entry i is
/// the 4-dimensional Laplacian in the variable q_i.
HermitianField hess_H(const ScalarField& u, const Differentiator& d,
                      Exec e = exec::default_policy());
HermitianField hess_H(const ScalarField& u, Scheme scheme);

/// Exact Hessian of a trigonometric polynomial sampled on the grid.
HermitianField hess_H_analytic(const TrigPoly& p, const Grid& g);

/// C + Hess_H(rho) with C = c Id and c = 1.5 |min_x mineig Hess_H rho| + 1.
HermitianField positive_hessian_field(const ScalarField& rho, const Differentiator& d,
                                      double* c_out = nullptr);

/// Tr(G^{-1} Hess_H h) pointwise. Throws PointError where G is singular.
ScalarField laplace_G(const ScalarField& h, const HermitianField& g, const Differentiator& d,
                      Exec e = exec::default_policy());
/// The same operator with respect to U.
ScalarField laplace_U(const ScalarField& v, const HermitianField& u, const Differentiator& d,
                      Exec e = exec::default_policy());
/// Flat Laplacian: sum of all second derivatives along active axes.
ScalarField flat_laplacian(const ScalarField& h, const Differentiator& d);

/// Laplacian along the quaternionic line zeta H: Re(zeta* Hess_H u zeta).
/// zeta is an n x 1 column of unit length.
ScalarField dir_laplace(const ScalarField& u, const QuatMatrix& zeta, const Differentiator& d,
                        Exec e = exec::default_policy());

/// Realization of det U * U^{-1} at every point.
RealSymField div_form_coeffs(const HermitianField& u, Exec e = exec::default_policy());

enum class DForm { trace, divergence };

/// det U * Tr(U^{-1} Hess_H h) in trace form, or sum_s D_s(sum_t a_st D_t h).
ScalarField apply_D(const HermitianField& u, const ScalarField& h, DForm form,
                    const Differentiator& d, Exec e = exec::default_policy());
/// Divergence form with precomputed coefficients.
ScalarField apply_divergence(const RealSymField& a, const ScalarField& h, const Differentiator& d,
                             Exec e = exec::default_policy());

/// Moore determinant per point (closed form for n <= 2).
ScalarField moore_det_field(const HermitianField& u, Exec e = exec::default_policy());
/// Smallest eigenvalue per point.
ScalarField min_eig_field(const HermitianField& u, Exec e = exec::default_policy());
/// Smallest eigenvalue over the grid and where it occurs.
struct GridMin {
  double value;
  std::size_t point;
};
GridMin grid_min_eig(const HermitianField& u, Exec e = exec::default_policy());

/// Trace of each point's matrix.
ScalarField trace_field(const HermitianField& u);

/// Trapezoid quadrature on the periodic grid: mean(f w) * volume.
double integrate(const ScalarField& f, Exec e = exec::default_policy());
double integrate(const ScalarField& f, const ScalarField& weight, Exec e = exec::default_policy());

/// Pointwise f -> fn(f).
template <class Fn>
ScalarField map(const ScalarField& f, Fn&& fn) {
  ScalarField out(f.grid());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = fn(f[i]);
  return out;
}

ScalarField multiply(const ScalarField& a, const ScalarField& b);

}  // namespace qma
