#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qma/grid.hpp"

namespace qma {

enum class Scheme { fd2, fd4, spectral };

std::string to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

/// Spectral when every non-frozen axis has a power-of-two size >= 8, else fd2.
Scheme default_scheme(const Grid& g);

/// Derivative along one axis. fd2/fd4 use centered periodic stencils; the
/// spectral scheme differentiates the discrete Fourier series with
/// wavenumbers -N/2+1..N/2 and drops the Nyquist mode from odd derivatives.
/// Frozen axes give the zero field. Throws StencilError on grids too small.
ScalarField partial(const ScalarField& f, std::size_t axis, int order, Scheme scheme);

/// Fourier transform over the active axes of a grid (FFTW, cached plans).
class Spectral {
 public:
  using Complex = std::complex<double>;

  explicit Spectral(const Grid& g);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;
  Spectral(Spectral&&) noexcept;
  Spectral& operator=(Spectral&&) noexcept;

  const Grid& grid() const;

  std::vector<Complex> forward(const ScalarField& f) const;
  /// Real part of the inverse transform (normalized).
  ScalarField inverse(std::vector<Complex> spectrum) const;

  /// Angular wavenumber 2 pi m / L of point index m along an axis, with the
  /// Nyquist index returned as +N/2.
  double wavenumber(std::size_t axis, int index) const;
  bool nyquist(std::size_t axis, int index) const;

  /// Multiplies by the spectral symbol of d/dx_s (order 1) or d^2/dx_s^2.
  ScalarField derivative(const std::vector<Complex>& spectrum, std::size_t axis, int order) const;
  /// d^2/dx_s dx_t for s != t as a composition of first derivatives.
  ScalarField cross(const std::vector<Complex>& spectrum, std::size_t s, std::size_t t) const;
  /// Solves c * (flat Laplacian) x = f on the mean-zero subspace; the
  /// constant mode of the result is zero.
  ScalarField inverse_laplacian(const ScalarField& f, double c = 1.0) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Bundles a grid, a scheme, and (for spectral) the transform.
class Differentiator {
 public:
  Differentiator(const Grid& g, Scheme scheme);

  const Grid& grid() const { return grid_; }
  Scheme scheme() const { return scheme_; }
  const Spectral* spectral() const { return spectral_.get(); }

  ScalarField d1(const ScalarField& f, std::size_t axis) const;
  /// d^2/dx_s dx_t: order-2 partial for s == t, composed first derivatives otherwise.
  ScalarField d2(const ScalarField& f, std::size_t s, std::size_t t) const;
  /// All first derivatives, indexed by axis (frozen axes hold zero fields).
  std::vector<ScalarField> gradient(const ScalarField& f) const;
  /// All second derivatives, index s * dim + t (symmetric, frozen pairs zero).
  std::vector<ScalarField> second(const ScalarField& f) const;

 private:
  Grid grid_;
  Scheme scheme_;
  std::shared_ptr<Spectral> spectral_;
};

}  // namespace qma
