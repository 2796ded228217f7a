#pragma once

#include <cstddef>
#include <span>

namespace qma {

/// How pointwise kernels and reductions run.
enum class Exec {
  serial,    ///< reference loops, sequential reductions
  parallel,  ///< OpenMP loops; reductions parallel unless deterministic mode is on
};

namespace exec {

/// Process-wide default policy. Reads QMA_THREADS on first use.
Exec default_policy();
void set_default_policy(Exec e);

/// Deterministic mode keeps every reduction sequential.
bool deterministic();
void set_deterministic(bool on);

int max_threads();

/// Sum with the reduction order implied by the policy.
double sum(std::span<const double> v, Exec e = default_policy());
double max_abs(std::span<const double> v, Exec e = default_policy());

}  // namespace exec

/// Runs fn(i) for i in [0, count).
template <class Fn>
void for_points(std::size_t count, Exec e, Fn&& fn) {
  if (e == Exec::parallel) {
    const auto total = static_cast<long long>(count);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < total; ++i) fn(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < count; ++i) fn(i);
  }
}

}  // namespace qma
