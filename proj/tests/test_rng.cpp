#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "linksched/rng.hpp"

using namespace linksched;

TEST_CASE("identical keys give identical streams") {
  Rng a = Rng::derive(123, {7, 9});
  Rng b = Rng::derive(123, {7, 9});
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("different derivation words give different streams") {
  Rng a = Rng::derive(123, {7, 9});
  Rng b = Rng::derive(123, {7, 10});
  Rng c = Rng::derive(124, {7, 9});
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t va = a.next_u64();
    if (va == b.next_u64()) ++same_ab;
    if (va == c.next_u64()) ++same_ac;
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("stream derivation is order-sensitive") {
  Rng a = Rng::derive(5, {1, 2});
  Rng b = Rng::derive(5, {2, 1});
  CHECK(a.next_u64() != b.next_u64());
}

TEST_CASE("uniform stays in [0,1) and is roughly uniform") {
  Rng rng = Rng::derive(99, {1});
  const int n = 100000;
  const int bins = 16;
  std::vector<int> counts(bins, 0);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    counts[static_cast<size_t>(u * bins)]++;
  }
  // Chi-square with 15 dof; the 0.001 critical value is 37.697.
  const double expected = static_cast<double>(n) / bins;
  double stat = 0.0;
  for (int c : counts) stat += (c - expected) * (c - expected) / expected;
  CHECK(stat < 37.697);
}

TEST_CASE("normal moments") {
  Rng rng = Rng::derive(7, {2});
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(std::sqrt(var) - 1.0) < 0.01);
}

TEST_CASE("uniform range endpoints") {
  Rng rng = Rng::derive(3, {4});
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(0.9, 1.1);
    CHECK(v >= 0.9);
    CHECK(v < 1.1);
  }
}
