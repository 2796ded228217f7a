#include "qma/hherm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "qma/errors.hpp"

namespace qma {

HyperHermitian::HyperHermitian(std::size_t n)
    : n_(n), diag_(n, 0.0), upper_(n * (n - 1) / 2) {
  if (n == 0) throw DimensionError("hyperhermitian matrix needs n >= 1");
}

HyperHermitian::HyperHermitian(std::vector<double> diagonal, std::vector<Quaternion> upper)
    : n_(diagonal.size()), diag_(std::move(diagonal)), upper_(std::move(upper)) {
  if (n_ == 0) throw DimensionError("hyperhermitian matrix needs n >= 1");
  if (upper_.size() != n_ * (n_ - 1) / 2) throw DimensionError("upper triangle has wrong length");
}

HyperHermitian HyperHermitian::identity(std::size_t n, double scale) {
  HyperHermitian a(n);
  std::fill(a.diag_.begin(), a.diag_.end(), scale);
  return a;
}

HyperHermitian HyperHermitian::diagonal(std::span<const double> d) {
  return HyperHermitian(std::vector<double>(d.begin(), d.end()),
                        std::vector<Quaternion>(d.size() * (d.size() - 1) / 2));
}

HyperHermitian HyperHermitian::from_matrix(const QuatMatrix& a, double tol) {
  if (!a.square()) throw DimensionError("hyperhermitian matrix must be square");
  const std::size_t n = a.rows();
  const double limit = tol * (1.0 + a.max_abs());
  HyperHermitian h(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(a(i, i).x) > limit || std::fabs(a(i, i).y) > limit ||
        std::fabs(a(i, i).z) > limit) {
      throw DimensionError("matrix diagonal is not real");
    }
    h.diag_[i] = a(i, i).w;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (qma::max_abs(a(i, j) - a(j, i).conj()) > limit) {
        throw DimensionError("matrix is not hyperhermitian");
      }
      h.upper_[upper_index(i, j, n)] = 0.5 * (a(i, j) + a(j, i).conj());
    }
  }
  return h;
}

Quaternion HyperHermitian::operator()(std::size_t i, std::size_t j) const {
  if (i == j) return Quaternion(diag_[i]);
  if (i < j) return upper_[upper_index(i, j, n_)];
  return upper_[upper_index(j, i, n_)].conj();
}

void HyperHermitian::set(std::size_t i, std::size_t j, const Quaternion& q) {
  if (i == j) {
    diag_[i] = q.w;
  } else if (i < j) {
    upper_[upper_index(i, j, n_)] = q;
  } else {
    upper_[upper_index(j, i, n_)] = q.conj();
  }
}

QuatMatrix HyperHermitian::to_matrix() const {
  QuatMatrix m(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

double HyperHermitian::trace() const { return std::accumulate(diag_.begin(), diag_.end(), 0.0); }

double HyperHermitian::max_abs() const {
  double m = 0.0;
  for (double d : diag_) m = std::max(m, std::fabs(d));
  for (const auto& q : upper_) m = std::max(m, qma::max_abs(q));
  return m;
}

HyperHermitian& HyperHermitian::operator+=(const HyperHermitian& o) {
  if (n_ != o.n_) throw DimensionError("hyperhermitian sum: size mismatch");
  for (std::size_t k = 0; k < diag_.size(); ++k) diag_[k] += o.diag_[k];
  for (std::size_t k = 0; k < upper_.size(); ++k) upper_[k] += o.upper_[k];
  return *this;
}

HyperHermitian& HyperHermitian::operator-=(const HyperHermitian& o) {
  if (n_ != o.n_) throw DimensionError("hyperhermitian difference: size mismatch");
  for (std::size_t k = 0; k < diag_.size(); ++k) diag_[k] -= o.diag_[k];
  for (std::size_t k = 0; k < upper_.size(); ++k) upper_[k] -= o.upper_[k];
  return *this;
}

HyperHermitian& HyperHermitian::operator*=(double s) {
  for (auto& d : diag_) d *= s;
  for (auto& q : upper_) q *= s;
  return *this;
}

HyperHermitian operator+(HyperHermitian a, const HyperHermitian& b) { return a += b; }
HyperHermitian operator-(HyperHermitian a, const HyperHermitian& b) { return a -= b; }
HyperHermitian operator*(HyperHermitian a, double s) { return a *= s; }
HyperHermitian operator*(double s, HyperHermitian a) { return a *= s; }

Eigen::MatrixXd realize(const HyperHermitian& a) {
  Eigen::MatrixXd r = realize(a.to_matrix());
  // Exact symmetry; the two triangles already agree up to sign bookkeeping.
  return 0.5 * (r + r.transpose());
}

HyperHermitian congruence(const HyperHermitian& a, const QuatMatrix& c) {
  if (c.rows() != a.n()) throw DimensionError("congruence: dimension mismatch");
  return HyperHermitian::from_matrix(c.adjoint() * a.to_matrix() * c, 1e-6);
}

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> realization_spectrum(const HyperHermitian& a,
                                                                   bool vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      realize(a), vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    // Eigen caps the QR sweeps at 30 per eigenvalue.
    throw ConvergenceError("realization eigen solver did not converge",
                           30 * static_cast<int>(4 * a.n()));
  }
  return es;
}

QuatMatrix as_quaternion_vector(const Eigen::VectorXd& v) {
  QuatMatrix q(static_cast<std::size_t>(v.size() / 4), 1);
  for (std::size_t i = 0; i < q.rows(); ++i) {
    const auto k = static_cast<Eigen::Index>(4 * i);
    q(i, 0) = Quaternion(v(k), v(k + 1), v(k + 2), v(k + 3));
  }
  return q;
}

double vector_norm(const QuatMatrix& v) { return std::sqrt(inner(v, v).w); }

// v <- v - sum_k basis_k (basis_k* v)
void project_out(QuatMatrix& v, const std::vector<QuatMatrix>& basis) {
  for (const auto& b : basis) {
    const Quaternion c = inner(b, v);
    for (std::size_t i = 0; i < v.rows(); ++i) v(i, 0) -= b(i, 0) * c;
  }
}

}  // namespace

EigenDecomposition eig(const HyperHermitian& a) {
  const std::size_t n = a.n();
  const auto es = realization_spectrum(a, true);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const Eigen::MatrixXd& vec = es.eigenvectors();
  const double scale = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
  const double cluster_tol = 1e-8 * scale;

  EigenDecomposition out;
  out.eigenvectors = QuatMatrix(n, n);
  std::vector<QuatMatrix> basis;

  Eigen::Index start = 0;
  const auto total = static_cast<Eigen::Index>(4 * n);
  while (start < total) {
    Eigen::Index end = start + 1;
    while (end < total && lam(end) - lam(end - 1) <= cluster_tol) ++end;
    // A cluster must be a union of quadruples; round to a multiple of 4.
    Eigen::Index size = end - start;
    size = std::max<Eigen::Index>(4, (size + 2) / 4 * 4);
    end = std::min(total, start + size);
    const std::size_t multiplicity = static_cast<std::size_t>((end - start) / 4);

    std::vector<QuatMatrix> cluster_basis;
    for (std::size_t m = 0; m < multiplicity; ++m) {
      QuatMatrix best;
      double best_norm = -1.0;
      for (Eigen::Index c = start; c < end; ++c) {
        QuatMatrix v = as_quaternion_vector(vec.col(c));
        project_out(v, basis);
        project_out(v, cluster_basis);
        const double nv = vector_norm(v);
        if (nv > best_norm) {
          best_norm = nv;
          best = std::move(v);
        }
      }
      // Re-orthogonalize once more for stability, then normalize.
      project_out(best, basis);
      project_out(best, cluster_basis);
      best *= 1.0 / vector_norm(best);
      cluster_basis.push_back(best);
    }
    double mean = 0.0;
    for (Eigen::Index c = start; c < end; ++c) mean += lam(c);
    mean /= static_cast<double>(end - start);
    for (std::size_t m = 0; m < multiplicity; ++m) {
      const std::size_t col = out.eigenvalues.size();
      if (multiplicity == 1) {
        out.eigenvalues.push_back(lam(start));
      } else {
        out.eigenvalues.push_back(mean);
      }
      for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, col) = cluster_basis[m](i, 0);
      basis.push_back(cluster_basis[m]);
    }
    start = end;
  }
  return out;
}

double min_eig(const HyperHermitian& a) {
  if (a.n() == 1) return a.diag()[0];
  if (a.n() == 2) {
    const double p = a.diag()[0], q = a.diag()[1];
    const double half = 0.5 * (p - q);
    return 0.5 * (p + q) - std::sqrt(half * half + a.upper()[0].norm2());
  }
  return realization_spectrum(a, false).eigenvalues()(0);
}

double moore_det(const HyperHermitian& a) {
  const auto es = realization_spectrum(a, false);
  const Eigen::VectorXd& lam = es.eigenvalues();
  double det = 1.0;
  for (Eigen::Index k = 0; k < lam.size(); k += 4) det *= lam(k);
  return det;
}

double moore_det_fast(const HyperHermitian& a) {
  if (a.n() == 1) return a.diag()[0];
  if (a.n() == 2) return a.diag()[0] * a.diag()[1] - a.upper()[0].norm2();
  return moore_det(a);
}

double mixed_det(std::span<const HyperHermitian> args) {
  const std::size_t n = args.size();
  if (n == 0) throw DimensionError("mixed determinant needs n arguments");
  for (const auto& a : args) {
    if (a.n() != n) throw DimensionError("mixed determinant: need n arguments of size n x n");
  }
  double sum = 0.0;
  const std::size_t subsets = std::size_t{1} << n;
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    HyperHermitian s(n);
    int count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) {
        s += args[i];
        ++count;
      }
    }
    const double sign = ((static_cast<int>(n) - count) % 2 == 0) ? 1.0 : -1.0;
    sum += sign * moore_det_fast(s);
  }
  double factorial = 1.0;
  for (std::size_t k = 2; k <= n; ++k) factorial *= static_cast<double>(k);
  return sum / factorial;
}

QuatMatrix cholesky(const HyperHermitian& a) {
  const std::size_t n = a.n();
  const double scale = std::max(a.max_abs(), 1e-300);
  QuatMatrix t(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double pivot = a.diag()[i];
    for (std::size_t k = 0; k < i; ++k) pivot -= t(k, i).norm2();
    if (!(pivot > 1e-14 * scale)) {
      std::ostringstream os;
      os << "cholesky: matrix not positive definite (pivot " << i << " = " << pivot << ")";
      throw NotPositiveDefinite(os.str());
    }
    const double tii = std::sqrt(pivot);
    t(i, i) = Quaternion(tii);
    for (std::size_t j = i + 1; j < n; ++j) {
      Quaternion s = a(i, j);
      for (std::size_t k = 0; k < i; ++k) s -= t(k, i).conj() * t(k, j);
      t(i, j) = s * (1.0 / tii);
    }
  }
  return t;
}

SimultaneousDiagonalization simdiag(const HyperHermitian& a, const HyperHermitian& b) {
  if (a.n() != b.n()) throw DimensionError("simdiag: size mismatch");
  const QuatMatrix r = cholesky(a);
  const QuatMatrix rinv = inverse(r);
  const HyperHermitian bt = congruence(b, rinv);
  const EigenDecomposition e = eig(bt);
  return {e.eigenvectors.adjoint() * r, e.eigenvalues};
}

HyperHermitian RankOneDecomposition::reconstruct() const {
  if (vectors.empty()) throw DimensionError("empty rank-one decomposition");
  const std::size_t n = vectors.front().rows();
  QuatMatrix sum(n, n);
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    sum += (vectors[k] * vectors[k].adjoint()) * weights[k];
  }
  return HyperHermitian::from_matrix(sum, 1e-6);
}

RankOneDecomposition rank_one_decomp(const HyperHermitian& a, double lambda, double Lambda) {
  if (lambda > Lambda) throw DimensionError("rank_one_decomp: empty spectral interval");
  const EigenDecomposition e = eig(a);
  const double slack = 1e-12 * (1.0 + std::max(std::fabs(lambda), std::fabs(Lambda)));
  RankOneDecomposition out;
  out.lambda_star = lambda;
  out.Lambda_star = Lambda;
  for (std::size_t k = 0; k < e.eigenvalues.size(); ++k) {
    const double l = e.eigenvalues[k];
    if (l < lambda - slack || l > Lambda + slack) {
      std::ostringstream os;
      os << "rank_one_decomp: eigenvalue " << l << " (index " << k << ") outside ["
         << lambda << ", " << Lambda << "]";
      throw DimensionError(os.str());
    }
    if (l == 0.0) continue;
    out.vectors.push_back(e.eigenvectors.column(k));
    out.weights.push_back(std::clamp(l, lambda, Lambda));
  }
  return out;
}

HyperHermitian inverse(const HyperHermitian& a) {
  if (a.n() == 1) {
    if (a.diag()[0] == 0.0) throw SingularMatrix("inverse: zero 1x1 matrix");
    return HyperHermitian::identity(1, 1.0 / a.diag()[0]);
  }
  if (a.n() == 2) {
    const double det = moore_det_fast(a);
    if (det == 0.0 || !std::isfinite(det)) throw SingularMatrix("inverse: singular 2x2 matrix");
    const double s = 1.0 / det;
    return HyperHermitian({a.diag()[1] * s, a.diag()[0] * s}, {-a.upper()[0] * s});
  }
  return HyperHermitian::from_matrix(inverse(a.to_matrix()), 1e-6);
}

double trace_product(const HyperHermitian& a, const HyperHermitian& b) {
  if (a.n() != b.n()) throw DimensionError("trace_product: size mismatch");
  const std::size_t n = a.n();
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) t += a.diag()[i] * b.diag()[i];
  // Re(a_ij b_ji + a_ji b_ij) = 2 Re(a_ij conj(b_ij)) for hyperhermitian a, b.
  for (std::size_t k = 0; k < a.upper().size(); ++k) {
    const Quaternion& p = a.upper()[k];
    const Quaternion& q = b.upper()[k];
    t += 2.0 * (p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z);
  }
  return t;
}

}  // namespace qma
