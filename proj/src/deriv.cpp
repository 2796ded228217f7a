#include "qma/deriv.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "qma/errors.hpp"
#include "qma/exec.hpp"

namespace qma {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::fd2: return "fd2";
    case Scheme::fd4: return "fd4";
    case Scheme::spectral: return "spectral";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "fd2") return Scheme::fd2;
  if (name == "fd4") return Scheme::fd4;
  if (name == "spectral") return Scheme::spectral;
  throw Error("unknown derivative scheme '" + std::string(name) + "'");
}

Scheme default_scheme(const Grid& g) {
  for (std::size_t s : g.active_axes()) {
    const int n = g.size(s);
    if (n < 8 || (n & (n - 1)) != 0) return Scheme::fd2;
  }
  return Scheme::spectral;
}

// ------------------------------------------------------------------ Spectral

namespace {

using Complex = std::complex<double>;

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// FFTW's planner is not thread safe; plans are created once per shape and
// kept for the life of the process. Executing a plan on new arrays is safe.
PlanPair plans_for(const std::vector<int>& shape) {
  static std::mutex mutex;
  static std::map<std::vector<int>, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(shape);
  if (it != cache.end()) return it->second;
  std::size_t total = 1;
  for (int n : shape) total *= static_cast<std::size_t>(n);
  auto* in = fftw_alloc_complex(total);
  auto* out = fftw_alloc_complex(total);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), in, out, FFTW_FORWARD,
                            flags);
  p.backward = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), in, out,
                             FFTW_BACKWARD, flags);
  fftw_free(in);
  fftw_free(out);
  if (p.forward == nullptr || p.backward == nullptr) throw Error("FFTW planning failed");
  cache.emplace(shape, p);
  return p;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct Spectral::Impl {
  Grid grid;
  std::vector<int> shape;
  PlanPair plans;
  // Per axis, per index: angular wavenumber.
  std::vector<std::vector<double>> k;
};

Spectral::Spectral(const Grid& g) : impl_(std::make_unique<Impl>()) {
  impl_->grid = g;
  for (std::size_t s : g.active_axes()) impl_->shape.push_back(g.size(s));
  if (!impl_->shape.empty()) impl_->plans = plans_for(impl_->shape);
  impl_->k.resize(g.dim());
  for (std::size_t s = 0; s < g.dim(); ++s) {
    const int n = g.size(s);
    impl_->k[s].resize(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
      const int wave = (2 * m <= n) ? m : m - n;
      impl_->k[s][static_cast<std::size_t>(m)] = 2.0 * std::numbers::pi * wave / g.period(s);
    }
  }
}

Spectral::~Spectral() = default;
Spectral::Spectral(Spectral&&) noexcept = default;
Spectral& Spectral::operator=(Spectral&&) noexcept = default;

const Grid& Spectral::grid() const { return impl_->grid; }

std::vector<Complex> Spectral::forward(const ScalarField& f) const {
  require_same_grid(impl_->grid, f.grid(), "spectral transform");
  const std::size_t total = f.size();
  std::vector<Complex> in(total), out(total);
  for (std::size_t i = 0; i < total; ++i) in[i] = Complex(f[i], 0.0);
  if (impl_->shape.empty()) return in;
  fftw_execute_dft(impl_->plans.forward, as_fftw(in.data()), as_fftw(out.data()));
  return out;
}

ScalarField Spectral::inverse(std::vector<Complex> spectrum) const {
  const std::size_t total = impl_->grid.points();
  ScalarField f(impl_->grid);
  if (impl_->shape.empty()) {
    f[0] = spectrum[0].real();
    return f;
  }
  std::vector<Complex> out(total);
  fftw_execute_dft(impl_->plans.backward, as_fftw(spectrum.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(total);
  for (std::size_t i = 0; i < total; ++i) f[i] = out[i].real() * scale;
  return f;
}

double Spectral::wavenumber(std::size_t axis, int index) const {
  return impl_->k[axis][static_cast<std::size_t>(index)];
}

bool Spectral::nyquist(std::size_t axis, int index) const {
  const int n = impl_->grid.size(axis);
  return n % 2 == 0 && 2 * index == n;
}

ScalarField Spectral::derivative(const std::vector<Complex>& spectrum, std::size_t axis,
                                 int order) const {
  const Grid& g = impl_->grid;
  if (g.frozen(axis)) return ScalarField(g);
  std::vector<Complex> s(spectrum);
  const auto& k = impl_->k[axis];
  for (std::size_t p = 0; p < s.size(); ++p) {
    const int m = g.coord_index(p, axis);
    const double kk = k[static_cast<std::size_t>(m)];
    if (order == 1) {
      s[p] = nyquist(axis, m) ? Complex(0.0) : Complex(-s[p].imag() * kk, s[p].real() * kk);
    } else {
      s[p] *= -kk * kk;
    }
  }
  return inverse(std::move(s));
}

ScalarField Spectral::cross(const std::vector<Complex>& spectrum, std::size_t a,
                            std::size_t b) const {
  const Grid& g = impl_->grid;
  if (g.frozen(a) || g.frozen(b)) return ScalarField(g);
  std::vector<Complex> s(spectrum);
  for (std::size_t p = 0; p < s.size(); ++p) {
    const int ma = g.coord_index(p, a);
    const int mb = g.coord_index(p, b);
    if (nyquist(a, ma) || nyquist(b, mb)) {
      s[p] = 0.0;
    } else {
      s[p] *= -wavenumber(a, ma) * wavenumber(b, mb);
    }
  }
  return inverse(std::move(s));
}

ScalarField Spectral::inverse_laplacian(const ScalarField& f, double c) const {
  const Grid& g = impl_->grid;
  std::vector<Complex> s = forward(f);
  for (std::size_t p = 0; p < s.size(); ++p) {
    double k2 = 0.0;
    for (std::size_t a : g.active_axes()) {
      const double kk = wavenumber(a, g.coord_index(p, a));
      k2 += kk * kk;
    }
    s[p] = (k2 == 0.0) ? Complex(0.0) : s[p] / (-c * k2);
  }
  return inverse(std::move(s));
}

// ---------------------------------------------------------------- stencils

namespace {

void require_stencil(const Grid& g, std::size_t axis, Scheme scheme) {
  const int need = scheme == Scheme::fd2 ? 4 : 6;
  if (g.size(axis) < need) {
    std::ostringstream os;
    os << "grid axis " << axis << " has " << g.size(axis) << " points; " << to_string(scheme)
       << " needs at least " << need;
    throw StencilError(os.str());
  }
}

ScalarField stencil(const ScalarField& f, std::size_t axis, int order, Scheme scheme) {
  const Grid& g = f.grid();
  require_stencil(g, axis, scheme);
  const double h = g.spacing(axis);
  ScalarField out(g);
  const auto v = f.values();
  for_points(g.points(), exec::default_policy(), [&](std::size_t p) {
    const double fm1 = v[g.shift(p, axis, -1)];
    const double fp1 = v[g.shift(p, axis, 1)];
    if (scheme == Scheme::fd2) {
      out[p] = order == 1 ? (fp1 - fm1) / (2.0 * h) : (fp1 - 2.0 * v[p] + fm1) / (h * h);
    } else {
      const double fm2 = v[g.shift(p, axis, -2)];
      const double fp2 = v[g.shift(p, axis, 2)];
      out[p] = order == 1 ? (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h)
                          : (-fp2 + 16.0 * fp1 - 30.0 * v[p] + 16.0 * fm1 - fm2) / (12.0 * h * h);
    }
  });
  return out;
}

}  // namespace

ScalarField partial(const ScalarField& f, std::size_t axis, int order, Scheme scheme) {
  const Grid& g = f.grid();
  if (axis >= g.dim()) throw DimensionError("partial: axis out of range");
  if (order != 1 && order != 2) throw Error("partial: order must be 1 or 2");
  if (g.frozen(axis)) return ScalarField(g);
  if (scheme == Scheme::spectral) {
    Spectral sp(g);
    return sp.derivative(sp.forward(f), axis, order);
  }
  return stencil(f, axis, order, scheme);
}

// ------------------------------------------------------------ Differentiator

Differentiator::Differentiator(const Grid& g, Scheme scheme) : grid_(g), scheme_(scheme) {
  if (scheme == Scheme::spectral) {
    spectral_ = std::make_shared<Spectral>(g);
  } else {
    for (std::size_t s : g.active_axes()) require_stencil(g, s, scheme);
  }
}

ScalarField Differentiator::d1(const ScalarField& f, std::size_t axis) const {
  if (grid_.frozen(axis)) return ScalarField(grid_);
  if (spectral_) return spectral_->derivative(spectral_->forward(f), axis, 1);
  return stencil(f, axis, 1, scheme_);
}

ScalarField Differentiator::d2(const ScalarField& f, std::size_t s, std::size_t t) const {
  if (grid_.frozen(s) || grid_.frozen(t)) return ScalarField(grid_);
  if (spectral_) {
    const auto spec = spectral_->forward(f);
    return s == t ? spectral_->derivative(spec, s, 2) : spectral_->cross(spec, s, t);
  }
  if (s == t) return stencil(f, s, 2, scheme_);
  return stencil(stencil(f, t, 1, scheme_), s, 1, scheme_);
}

std::vector<ScalarField> Differentiator::gradient(const ScalarField& f) const {
  std::vector<ScalarField> out(grid_.dim(), ScalarField(grid_));
  if (spectral_) {
    if (grid_.active_axes().empty()) return out;
    const auto spec = spectral_->forward(f);
    for (std::size_t s : grid_.active_axes()) out[s] = spectral_->derivative(spec, s, 1);
    return out;
  }
  for (std::size_t s : grid_.active_axes()) out[s] = stencil(f, s, 1, scheme_);
  return out;
}

std::vector<ScalarField> Differentiator::second(const ScalarField& f) const {
  const std::size_t m = grid_.dim();
  std::vector<ScalarField> out(m * m, ScalarField(grid_));
  const auto axes = grid_.active_axes();
  if (axes.empty()) return out;
  if (spectral_) {
    const auto spec = spectral_->forward(f);
    for (std::size_t a = 0; a < axes.size(); ++a)
      for (std::size_t b = a; b < axes.size(); ++b) {
        const std::size_t s = axes[a], t = axes[b];
        out[s * m + t] = s == t ? spectral_->derivative(spec, s, 2) : spectral_->cross(spec, s, t);
        out[t * m + s] = out[s * m + t];
      }
    return out;
  }
  std::vector<ScalarField> grad(m, ScalarField(grid_));
  for (std::size_t s : axes) grad[s] = stencil(f, s, 1, scheme_);
  for (std::size_t a = 0; a < axes.size(); ++a)
    for (std::size_t b = a; b < axes.size(); ++b) {
      const std::size_t s = axes[a], t = axes[b];
      out[s * m + t] = s == t ? stencil(f, s, 2, scheme_) : stencil(grad[t], s, 1, scheme_);
      out[t * m + s] = out[s * m + t];
    }
  return out;
}

}  // namespace qma
