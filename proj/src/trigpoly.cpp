#include "qma/trigpoly.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "qma/errors.hpp"

namespace qma {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_term(const TrigTerm& t, std::size_t dim) {
  if (t.k.size() != dim) throw DimensionError("trig term: frequency vector has wrong length");
}

// Phase 2 pi k.x/L and the angular frequency vector omega_s = 2 pi k_s / L_s.
double phase(const TrigTerm& t, std::span<const double> x, std::span<const double> periods) {
  double ph = 0.0;
  for (std::size_t s = 0; s < x.size(); ++s)
    if (t.k[s] != 0) ph += kTwoPi * t.k[s] * x[s] / periods[s];
  return ph;
}

}  // namespace

double TrigPoly::value(std::span<const double> x, std::span<const double> periods) const {
  double v = 0.0;
  for (const auto& t : terms_) {
    check_term(t, x.size());
    const double ph = phase(t, x, periods);
    v += t.cos * std::cos(ph) + t.sin * std::sin(ph);
  }
  return v;
}

Eigen::MatrixXd TrigPoly::hessian(std::span<const double> x,
                                  std::span<const double> periods) const {
  const auto m = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd omega(m);
  for (const auto& t : terms_) {
    check_term(t, x.size());
    const double ph = phase(t, x, periods);
    for (Eigen::Index s = 0; s < m; ++s) omega(s) = kTwoPi * t.k[static_cast<std::size_t>(s)] /
                                                   periods[static_cast<std::size_t>(s)];
    // d^2/dx_s dx_t of a cos + b sin = -omega_s omega_t (a cos + b sin).
    const double v = t.cos * std::cos(ph) + t.sin * std::sin(ph);
    h.noalias() -= v * omega * omega.transpose();
  }
  return h;
}

std::vector<Eigen::MatrixXd> TrigPoly::third(std::span<const double> x,
                                             std::span<const double> periods) const {
  const auto m = static_cast<Eigen::Index>(x.size());
  std::vector<Eigen::MatrixXd> out(x.size(), Eigen::MatrixXd::Zero(m, m));
  Eigen::VectorXd omega(m);
  for (const auto& t : terms_) {
    check_term(t, x.size());
    const double ph = phase(t, x, periods);
    for (Eigen::Index s = 0; s < m; ++s) omega(s) = kTwoPi * t.k[static_cast<std::size_t>(s)] /
                                                   periods[static_cast<std::size_t>(s)];
    // Third derivative of a cos + b sin is omega^3 (a sin - b cos).
    const double v = t.cos * std::sin(ph) - t.sin * std::cos(ph);
    const Eigen::MatrixXd outer = omega * omega.transpose();
    for (Eigen::Index a = 0; a < m; ++a) out[static_cast<std::size_t>(a)] += v * omega(a) * outer;
  }
  return out;
}

void TrigPoly::check_aliasing(const Grid& g) const {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    check_term(terms_[i], g.dim());
    for (std::size_t s = 0; s < g.dim(); ++s) {
      if (2 * std::abs(terms_[i].k[s]) > g.size(s)) {
        std::ostringstream os;
        os << "trig term " << i << " has frequency " << terms_[i].k[s] << " on axis " << s
           << " above the grid limit " << g.size(s) / 2;
        throw AliasingError(os.str());
      }
    }
  }
}

TrigPoly TrigPoly::random(std::size_t dim, std::span<const std::size_t> axes, int kmax,
                          int count, double amp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> freq(-kmax, kmax);
  std::uniform_real_distribution<double> coef(-amp, amp);
  TrigPoly p;
  for (int c = 0; c < count; ++c) {
    TrigTerm t;
    t.k.assign(dim, 0);
    bool nonzero = false;
    while (!nonzero) {
      for (std::size_t a : axes) {
        t.k[a] = freq(rng);
        nonzero = nonzero || t.k[a] != 0;
      }
      if (axes.empty()) break;
    }
    t.cos = coef(rng);
    t.sin = coef(rng);
    p.add(std::move(t));
  }
  return p;
}

ScalarField sample_trigpoly(const TrigPoly& p, const Grid& g) {
  p.check_aliasing(g);
  ScalarField f(g);
  std::vector<double> x(g.dim());
  for (std::size_t i = 0; i < g.points(); ++i) {
    g.coords(i, x);
    f[i] = p.value(x, g.periods());
  }
  return f;
}

}  // namespace qma
