#include <doctest.h>

#include <algorithm>
#include <set>

#include "hrrpbench/rng.hpp"

using namespace hrrp;

TEST_SUITE_BEGIN("rng");

TEST_CASE("same seed yields the same stream") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derive_seed separates salts") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t salt = 0; salt < 64; ++salt) seen.insert(derive_seed(7, salt));
  CHECK(seen.size() == 64);
}

TEST_CASE("below stays in range and covers it") {
  Rng rng(5);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    std::uint64_t v = rng.below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK(rng.below(1) == 0);
  CHECK(rng.below(0) == 0);
}

TEST_CASE("uniform01 lies in [0,1)") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    double v = rng.uniform01();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("shuffle permutes without losing elements") {
  Rng rng(3);
  std::vector<int> values(50);
  for (int i = 0; i < 50; ++i) values[static_cast<std::size_t>(i)] = i;
  auto shuffled = values;
  rng.shuffle(shuffled);
  CHECK(shuffled != values);  // astronomically unlikely to be identity
  std::sort(shuffled.begin(), shuffled.end());
  CHECK(shuffled == values);
}

TEST_CASE("normal has roughly the requested moments") {
  Rng rng(17);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double v = rng.normal(2.0, 3.0);
    sum += v;
    sum_sq += v * v;
  }
  double mean = sum / n;
  double var = sum_sq / n - mean * mean;
  CHECK(mean == doctest::Approx(2.0).epsilon(0.05));
  CHECK(var == doctest::Approx(9.0).epsilon(0.08));
}

TEST_CASE("fnv1a64 matches the reference vector") {
  // Published FNV-1a test vector.
  CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
  CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
}

TEST_SUITE_END();
