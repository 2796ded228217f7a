#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qma/exec.hpp"

using namespace qma;

TEST_CASE("sequential mode reproduces the plain loop") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<double> v(100001);
  for (double& x : v) x = u(rng);
  double plain = 0.0;
  for (double x : v) plain += x;
  CHECK(exec::sum(v, Exec::serial) == plain);
  const bool before = exec::deterministic();
  exec::set_deterministic(true);
  CHECK(exec::sum(v, Exec::parallel) == plain);
  exec::set_deterministic(false);
  CHECK(std::fabs(exec::sum(v, Exec::parallel) - plain) <= 1e-9 * 1e3 * static_cast<double>(v.size()));
  exec::set_deterministic(before);
}

TEST_CASE("max_abs agrees across policies") {
  std::vector<double> v{1.0, -7.5, 3.0, 7.25};
  CHECK(exec::max_abs(v, Exec::serial) == 7.5);
  CHECK(exec::max_abs(v, Exec::parallel) == 7.5);
  CHECK(exec::max_abs(std::vector<double>{}, Exec::parallel) == 0.0);
}

TEST_CASE("for_points visits every index once") {
  for (Exec e : {Exec::serial, Exec::parallel}) {
    std::vector<int> hits(1000, 0);
    for_points(hits.size(), e, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
  }
}

TEST_CASE("policy switches") {
  const Exec before = exec::default_policy();
  exec::set_default_policy(Exec::serial);
  CHECK(exec::default_policy() == Exec::serial);
  exec::set_default_policy(before);
  CHECK(exec::max_threads() >= 1);
}
