#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <random>
#include <vector>

#include "defectlab/fem.hpp"

using namespace defectlab;

TEST_CASE("gauss rules are exact to degree 2n-1") {
  for (int n = 1; n <= 10; ++n) {
    const GaussRule& g = gauss_rule(n);
    REQUIRE(static_cast<int>(g.x.size()) == n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += g.w[i] * std::pow(g.x[i], deg);
      const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
      CHECK(std::abs(q - exact) <= 1e-13);
    }
    // One degree past the exactness window must fail for n <= 3.
    if (n <= 3) {
      double q = 0.0;
      for (int i = 0; i < n; ++i) q += g.w[i] * std::pow(g.x[i], 2 * n);
      CHECK(std::abs(q - 2.0 / (2 * n + 1)) > 1e-6);
    }
  }
}

TEST_CASE("composite gauss integrates element-wise polynomials exactly") {
  const std::vector<double> breaks{0.0, 0.3, 1.1, 2.0, 5.0};
  const CompositeQuad q = composite_gauss(breaks, 4);
  REQUIRE(q.r.size() == q.w.size());
  REQUIRE(q.r.size() == 16);
  double total = 0.0, cubic = 0.0;
  for (std::size_t i = 0; i < q.r.size(); ++i) {
    total += q.w[i];
    cubic += q.w[i] * std::pow(q.r[i], 7);
  }
  CHECK(total == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(cubic == doctest::Approx(std::pow(5.0, 8) / 8.0).epsilon(1e-13));
  for (std::size_t i = 0; i + 1 < q.r.size(); ++i) CHECK(q.r[i] < q.r[i + 1]);
  CHECK(q.r.front() > 0.0);
}

TEST_CASE("pairwise sum is permutation-stable in construction order") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> terms(1023);
  for (double& t : terms) t = unit(rng) * std::pow(10.0, unit(rng) * 6.0);
  long double ref = 0.0L;
  for (double t : terms) ref += static_cast<long double>(t);
  const double s1 = pairwise_sum(terms);
  const double s2 = pairwise_sum(terms);
  CHECK(s1 == s2);
  CHECK(std::abs(s1 - static_cast<double>(ref)) <=
        1e-12 * std::max(1.0, std::abs(static_cast<double>(ref))));
}

TEST_CASE("piecewise-linear interpolation helpers") {
  const std::vector<double> nodes{0.0, 1.0, 2.5, 4.0};
  const std::vector<double> vals{1.0, 3.0, 0.0, 2.0};
  CHECK(find_cell(nodes, 0.5) == 0);
  CHECK(find_cell(nodes, 1.0) == 1);
  CHECK(find_cell(nodes, 3.9) == 2);
  CHECK(interp_p1(nodes, vals, 0.5) == doctest::Approx(2.0));
  CHECK(interp_p1(nodes, vals, 2.5) == doctest::Approx(0.0));
  CHECK(interp_p1(nodes, vals, 3.25) == doctest::Approx(1.0));
  CHECK(interp_p1_slope(nodes, vals, 0.25) == doctest::Approx(2.0));
  CHECK(interp_p1_slope(nodes, vals, 2.0) == doctest::Approx(-2.0));
  CHECK(interp_p1_slope(nodes, vals, 3.0) == doctest::Approx(2.0 / 1.5));
}

TEST_CASE("integrate_breaks on a smooth integrand") {
  std::vector<double> breaks(101);
  for (int i = 0; i <= 100; ++i) breaks[i] = 2.0 * i / 100.0;
  const double got = integrate_breaks(breaks, 6, [](double r) { return std::exp(-r) * r; });
  const double exact = 1.0 - 3.0 * std::exp(-2.0);
  CHECK(got == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("thread budget honors the environment cap") {
  setenv("DEFECTLAB_THREADS", "2", 1);
  CHECK(thread_budget() <= 2);
  CHECK(thread_budget(1) == 1);
  unsetenv("DEFECTLAB_THREADS");
  CHECK(thread_budget() >= 1);
}

TEST_CASE("parallel blocks cover the range exactly once") {
  const int n = 1009;
  std::vector<std::atomic<int>> hits(n);
  for (auto& h : hits) h.store(0);
  parallel_blocks(n, 4, [&](int b, int e) {
    for (int i = b; i < e; ++i) hits[i].fetch_add(1);
  });
  for (int i = 0; i < n; ++i) CHECK(hits[i].load() == 1);
}
