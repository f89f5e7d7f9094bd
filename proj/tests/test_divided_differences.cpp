#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "vgp/divided_differences.hpp"
#include "vgp/rng.hpp"

using namespace vgp;

TEST_CASE("divided differences of exp(-beta x)") {
  CHECK(divided_differences(1.0, {0.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(divided_differences(1.0, {0.0, 1.0}) ==
        doctest::Approx((1.0 - std::exp(-1.0)) / (0.0 - 1.0)).epsilon(1e-14));
  CHECK(divided_differences(1.0, {0.0, 0.0}) == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(divided_differences(2.0, {0.5}) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("agreement with the explicit sum on distinct nodes") {
  Rng rng(2024);
  for (int t = 0; t < 300; ++t) {
    const int q = 1 + static_cast<int>(rng.below(10));
    const double beta = 0.1 + 2.0 * rng.uniform();
    std::vector<double> nodes(q + 1);
    for (auto& x : nodes) x = -3.0 + 6.0 * rng.uniform();
    const double want = oracle::dd_explicit(beta, nodes);
    const double got = divided_differences(beta, nodes);
    CHECK(std::abs(got - want) <= 1e-10 * std::abs(want));
    CHECK(std::signbit(got) == (q % 2 == 1));
  }
}

TEST_CASE("confluent limits") {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const int q = static_cast<int>(rng.below(9));
    const double beta = 0.2 + rng.uniform();
    const double x = -2.0 + 4.0 * rng.uniform();
    double fact = 1.0;
    for (int k = 2; k <= q; ++k) fact *= k;
    const double want = std::pow(-beta, q) * std::exp(-beta * x) / fact;
    CHECK(divided_differences(beta, std::vector<double>(q + 1, x)) ==
          doctest::Approx(want).epsilon(1e-12));
  }
  // partial repeats against the recursive definition
  for (int t = 0; t < 100; ++t) {
    std::vector<double> nodes;
    const int distinct = 1 + static_cast<int>(rng.below(4));
    for (int d = 0; d < distinct; ++d) {
      const double x = -2.0 + 4.0 * rng.uniform();
      const int reps = 1 + static_cast<int>(rng.below(3));
      for (int r = 0; r < reps; ++r) nodes.push_back(x);
    }
    const double beta = 0.5 + rng.uniform();
    const double got = divided_differences(beta, nodes);
    CHECK(got == doctest::Approx(oracle::dd_recursive(beta, nodes)).epsilon(1e-8));
    CHECK(std::signbit(got) == (nodes.size() % 2 == 0));
  }
}

TEST_CASE("symmetric in the node order") {
  const std::vector<double> a{0.3, -1.2, 2.0, 0.3, 1.1};
  const std::vector<double> b{1.1, 0.3, 2.0, -1.2, 0.3};
  CHECK(divided_differences(1.3, a) == doctest::Approx(divided_differences(1.3, b)).epsilon(1e-13));
}

TEST_CASE("log form matches and survives underflow") {
  const std::vector<double> nodes{0.0, 0.5, 1.0, 1.5};
  const auto l = log_divided_differences(1.0, nodes);
  CHECK(l.sign == -1);
  CHECK(l.sign * std::exp(l.log_abs) ==
        doctest::Approx(divided_differences(1.0, nodes)).epsilon(1e-13));
  std::vector<double> deep(61, 0.0);
  for (int k = 0; k <= 60; ++k) deep[k] = 0.01 * k;
  const auto ld = log_divided_differences(1.0, deep);
  CHECK(std::isfinite(ld.log_abs));
  CHECK(ld.sign == 1);
  // 1/60! bounds the magnitude from above
  CHECK(ld.log_abs < -std::lgamma(61.0) + 1e-9);
  CHECK(ld.log_abs > -std::lgamma(61.0) - 1.0);
}

TEST_CASE("large beta and wide spread stay accurate") {
  const std::vector<double> nodes{-4.0, -1.0, 3.0};
  const double beta = 10.0;
  CHECK(divided_differences(beta, nodes) ==
        doctest::Approx(oracle::dd_explicit(beta, nodes)).epsilon(1e-10));
}
