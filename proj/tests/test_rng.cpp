#include <cmath>
#include <set>
#include <vector>

#include <doctest.h>

#include "rnloc/rng.hpp"

using namespace rnloc;

TEST_CASE("same seed reproduces the same sequence") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds give different sequences") {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++same;
  CHECK(same == 0);
}

TEST_CASE("derive_stream separates counters") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t c = 0; c < 1000; ++c) seen.insert(derive_stream(7, c));
  CHECK(seen.size() == 1000);
  CHECK(derive_stream(7, 0) != derive_stream(8, 0));
}

TEST_CASE("uniform01 stays in [0,1) with the right moments") {
  Rng rng(3);
  double sum = 0.0, sumsq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("uniform maps to the requested interval") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-3.0, 7.0);
    CHECK(v >= -3.0);
    CHECK(v < 7.0);
  }
}

TEST_CASE("gaussian has standard moments") {
  Rng rng(11);
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(sumsq / n - mean * mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uniform_int covers [0,n) roughly evenly") {
  Rng rng(13);
  std::vector<int> counts(10, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const int k = rng.uniform_int(10);
    REQUIRE(k >= 0);
    REQUIRE(k < 10);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - n / 10) < 500);
}
