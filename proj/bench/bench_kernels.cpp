#include <benchmark/benchmark.h>

#include "qma/calculus.hpp"
#include "qma/estimates.hpp"

namespace {

struct Fixture {
  qma::Grid grid{2, {8, 8, 8, 8, 1, 1, 1, 1}};
  qma::Differentiator d{grid, qma::Scheme::spectral};
  qma::ScalarField rho = qma::sample_trigpoly(qma::random_potential(grid, 3), grid);
  qma::HermitianField U = qma::positive_hessian_field(rho, d);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

qma::Exec policy(const benchmark::State& state) {
  return state.range(0) == 0 ? qma::Exec::serial : qma::Exec::parallel;
}

void BM_HessH(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(qma::hess_H(f.rho, f.d, policy(state)));
}

void BM_MooreDetField(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(qma::moore_det_field(f.U, policy(state)));
}

void BM_MinEigField(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(qma::min_eig_field(f.U, policy(state)));
}

void BM_ApplyDivergence(benchmark::State& state) {
  const auto& f = fixture();
  const qma::RealSymField a = qma::div_form_coeffs(f.U, policy(state));
  for (auto _ : state)
    benchmark::DoNotOptimize(qma::apply_divergence(a, f.rho, f.d, policy(state)));
}

}  // namespace

BENCHMARK(BM_HessH)->Arg(0)->Arg(1)->ArgName("parallel");
BENCHMARK(BM_MooreDetField)->Arg(0)->Arg(1)->ArgName("parallel");
BENCHMARK(BM_MinEigField)->Arg(0)->Arg(1)->ArgName("parallel");
BENCHMARK(BM_ApplyDivergence)->Arg(0)->Arg(1)->ArgName("parallel");

BENCHMARK_MAIN();
