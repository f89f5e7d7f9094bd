#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "vgp/errors.hpp"
#include "vgp/numerics.hpp"
#include "vgp/rng.hpp"

using namespace vgp;

namespace {

CMatrix pauli(char l) {
  CMatrix m(2, 2);
  if (l == 'X') m << 0, 1, 1, 0;
  if (l == 'Z') m << 1, 0, 0, -1;
  if (l == 'Y') m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

}  // namespace

TEST_CASE("eigenvalues of Pauli Z and X") {
  for (char l : {'Z', 'X', 'Y'}) {
    const auto ev = hermitian_eigvals(HermitianMatrix(pauli(l)));
    REQUIRE(ev.size() == 2);
    CHECK(ev[0] == doctest::Approx(-1.0));
    CHECK(ev[1] == doctest::Approx(1.0));
  }
}

TEST_CASE("eigenvalues agree with a Jacobi oracle on random Hermitian matrices") {
  Rng rng(11);
  for (int n : {3, 8, 16}) {
    const CMatrix a = oracle::random_hermitian(n, rng);
    const auto ev = hermitian_eigvals(HermitianMatrix(a));
    const auto ref = oracle::jacobi_eigvals(a);
    for (int i = 0; i < n; ++i) CHECK(std::abs(ev[i] - ref[i]) < 1e-8);
    double sum = 0.0;
    for (double x : ev) sum += x;
    CHECK(std::abs(sum - a.trace().real()) < 1e-8 * n);
  }
}

TEST_CASE("block-structured matrices are split and solved per block") {
  Rng rng(5);
  CMatrix a = CMatrix::Zero(6, 6);
  a.block(0, 0, 3, 3) = oracle::random_hermitian(3, rng);
  a.block(3, 3, 3, 3) = oracle::random_hermitian(3, rng).real().cast<cplx>();
  const auto ev = hermitian_eigvals(HermitianMatrix(a));
  const auto ref = oracle::jacobi_eigvals(a);
  for (int i = 0; i < 6; ++i) CHECK(std::abs(ev[i] - ref[i]) < 1e-10);
}

TEST_CASE("eigendecomposition reconstructs the matrix") {
  Rng rng(3);
  const CMatrix a = oracle::random_hermitian(10, rng);
  const auto d = hermitian_eigen(HermitianMatrix(a));
  const CMatrix back = d.vectors * d.values.cast<cplx>().asDiagonal() * d.vectors.adjoint();
  CHECK((back - a).norm() < 1e-9 * a.norm());
}

TEST_CASE("non-Hermitian input is rejected") {
  CMatrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_THROWS_AS(HermitianMatrix{m}, ValidationError);
  CHECK(hermitian_defect(m) == doctest::Approx(1.0));
}

TEST_CASE("trace of exponentials") {
  CHECK(trace_exp(HermitianMatrix(CMatrix::Identity(2, 2)), 1.0).value ==
        doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-12));
  CHECK(trace_exp(HermitianMatrix(pauli('X')), 1.0).value ==
        doctest::Approx(2.0 * std::cosh(1.0)).epsilon(1e-12));
  Rng rng(2);
  const CMatrix a = oracle::random_hermitian(16, rng);
  CHECK(trace_exp(HermitianMatrix(a), 0.0).value == doctest::Approx(16.0).epsilon(1e-14));
  for (double s : {-0.7, 0.3, 1.9}) {
    const double t = trace_exp(HermitianMatrix(a), s).value;
    CHECK(std::abs(t - oracle::trace_exp(a, s)) < 1e-9 * t);
    CHECK(std::abs(t - oracle::expm_series(s * a).trace().real()) < 1e-9 * t);
  }
}

TEST_CASE("trace of exponentials reports the logarithm when the value overflows") {
  const CMatrix big = 800.0 * CMatrix::Identity(3, 3);
  const auto t = trace_exp(HermitianMatrix(big), 1.0);
  CHECK(std::isinf(t.value));
  CHECK(t.log_value == doctest::Approx(800.0 + std::log(3.0)));
  CHECK(log_sum_exp({1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
}

TEST_CASE("GF(2) circuits on small mask sets") {
  {
    const auto c = gf2_circuits({0b110, 0b011, 0b101}, 6);
    std::set<std::vector<int>> got(c.begin(), c.end());
    CHECK(got.count({0, 1, 2}) == 1);
    CHECK(got.count({0, 0}) == 1);
    CHECK(got.size() == 4);
  }
  {
    const auto c = gf2_circuits({0b100, 0b010}, 4);
    std::set<std::vector<int>> got(c.begin(), c.end());
    CHECK(got == std::set<std::vector<int>>{{0, 0}, {1, 1}});
  }
  {
    const auto c = gf2_circuits({0b100, 0b100}, 4);
    std::set<std::vector<int>> got(c.begin(), c.end());
    CHECK(got == std::set<std::vector<int>>{{0, 1}, {0, 0}, {1, 1}});
  }
  CHECK_THROWS_AS(gf2_circuits({0b1, 0}, 4), ValidationError);
}

TEST_CASE("GF(2) circuits match exhaustive subset search") {
  Rng rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 3 + static_cast<int>(rng.below(8));
    std::vector<Mask> masks(m);
    for (auto& x : masks) x = 1 + static_cast<Mask>(rng.below(31));
    const int max_size = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
    const auto got = gf2_circuits(masks, max_size);
    std::set<unsigned> circuits;
    for (const auto& c : got) {
      if (c.size() == 2 && c[0] == c[1]) continue;
      Mask acc = 0;
      unsigned bits = 0;
      for (int j : c) {
        acc ^= masks[j];
        bits |= 1u << j;
      }
      CHECK(acc == 0);
      CHECK(static_cast<int>(c.size()) <= max_size);
      circuits.insert(bits);
    }
    // minimal zero-XOR subsets within the size bound, found by brute force
    const auto all = oracle::zero_xor_subsets(masks);
    std::set<unsigned> minimal;
    for (unsigned s : all) {
      if (__builtin_popcount(s) > max_size) continue;
      const bool has_smaller = std::any_of(all.begin(), all.end(), [s](unsigned t) {
        return t != s && (t & s) == t;
      });
      if (!has_smaller) minimal.insert(s);
    }
    CHECK(circuits == minimal);
  }
}

TEST_CASE("Bessel I1") {
  CHECK(bessel_i1(0.0) == 0.0);
  CHECK(bessel_i1(1.0) == doctest::Approx(0.5651591040).epsilon(1e-9));
  CHECK(bessel_i1(2.0) == doctest::Approx(1.5906368546).epsilon(1e-9));
  double prev = -1.0;
  for (double x = 0.0; x <= 20.0; x += 0.25) {
    const double v = bessel_i1(x);
    CHECK(std::abs(v - oracle::bessel_i1_series(x)) <= 1e-10 * std::max(1.0, v));
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(bessel_i1(-1.0), ValidationError);
}

TEST_CASE("seeded random streams") {
  Rng a(0), b(0), c(1);
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    const auto y = b.next_u64();
    CHECK(x == y);
    if (i < 10) differ = differ || (x != c.next_u64());
  }
  CHECK(differ);
  Rng u(42);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = u.uniform();
    CHECK_FALSE((v < 0.0 || v >= 1.0));
    sum += v;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);
  Rng s0 = Rng::stream(5, 0), s1 = Rng::stream(5, 1);
  CHECK(s0.next_u64() != s1.next_u64());
  for (int i = 0; i < 1000; ++i) CHECK(u.below(7) < 7);
}
