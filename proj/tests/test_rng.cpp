#include <doctest.h>

#include <cmath>

#include "gesture/rng.hpp"

using namespace gesture;

// Reference values from an independent big-integer implementation.
TEST_CASE("xoshiro256** stream seeded through splitmix64") {
  Rng a(0);
  CHECK(a() == 0x99ec5f36cb75f2b4ULL);
  CHECK(a() == 0xbf6e1f784956452aULL);
  CHECK(a() == 0x1a5f849d4933e6e0ULL);

  Rng b(42);
  CHECK(b() == 0x15780b2e0c2ec716ULL);
  CHECK(b() == 0x6104d9866d113a7eULL);
  CHECK(b() == 0xae17533239e499a1ULL);
}

TEST_CASE("derived seeds") {
  CHECK(derive_seed(7, 0) == 0xd11f5a75f7215b2aULL);
  CHECK(derive_seed(7, 1) == 0xb434b225e96a3b06ULL);
  CHECK(derive_seed(0, 0) == 0x75856f745165f252ULL);
}

TEST_CASE("uniform, below and normal draws") {
  Rng u(1);
  CHECK(u.uniform() == 0.7029218331588505);

  Rng n(5);
  CHECK(n.normal() == doctest::Approx(-0.6609817491416791).epsilon(1e-14));

  Rng k(9);
  const std::uint64_t want[] = {0, 5, 7, 6, 7};
  for (std::uint64_t w : want) CHECK(k.below(10) == w);

  Rng r(3);
  for (int i = 0; i < 10000; ++i) {
    const double x = r.uniform();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(r.below(7) < 7);
  }
}

TEST_CASE("normal draws have unit spread") {
  Rng r(11);
  double sum = 0.0, sq = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(sq / n - mean * mean - 1.0) < 0.01);
}
