#include "qma/exec.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qma::exec {
namespace {

int read_thread_cap() {
  const char* env = std::getenv("QMA_THREADS");
  if (env == nullptr) return 0;
  try {
    const int v = std::stoi(env);
    return v > 0 ? v : 0;
  } catch (...) {
    return 0;
  }
}

struct State {
  std::atomic<Exec> policy{Exec::parallel};
  std::atomic<bool> deterministic{false};
  State() {
#ifdef _OPENMP
    const int cap = read_thread_cap();
    if (cap > 0) omp_set_num_threads(cap);
#endif
  }
};

State& state() {
  static State s;
  return s;
}

}  // namespace

Exec default_policy() { return state().policy.load(); }
void set_default_policy(Exec e) { state().policy.store(e); }

bool deterministic() { return state().deterministic.load(); }
void set_deterministic(bool on) { state().deterministic.store(on); }

int max_threads() {
  state();
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double sum(std::span<const double> v, Exec e) {
  if (e == Exec::serial || deterministic()) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  double s = 0.0;
  const auto total = static_cast<long long>(v.size());
  const double* p = v.data();
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (long long i = 0; i < total; ++i) s += p[i];
  return s;
}

double max_abs(std::span<const double> v, Exec e) {
  // Max is order independent, so no deterministic special case is needed.
  double m = 0.0;
  if (e == Exec::serial) {
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
  }
  const auto total = static_cast<long long>(v.size());
  const double* p = v.data();
#pragma omp parallel for reduction(max : m) schedule(static)
  for (long long i = 0; i < total; ++i) m = std::max(m, std::fabs(p[i]));
  return m;
}

}  // namespace qma::exec
