#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "vgp/diagnostics.hpp"
#include "vgp/errors.hpp"
#include "vgp/models.hpp"
#include "vgp/pmr.hpp"
#include "vgp/rng.hpp"

using namespace vgp;

namespace {

const cplx I(0.0, 1.0);

HermitianMatrix dense(const char* text) { return to_dense(parse_hamiltonian(text)); }

const char* kFerroTriangle = "N=3\n-1 X0 X1\n-1 X1 X2\n-1 X0 X2";
const char* kAntiTriangle = "N=3\n1 X0 X1\n1 X1 X2\n1 X0 X2";

double fvgp_of(const PauliSum& h, int Q) { return f_vgp(all_cycles(pmr_decompose(h), Q)); }

// Stoquastic sum of X/Z strings with negative off-diagonal coefficients.
PauliSum random_stoquastic(int n, int terms, Rng& rng) {
  PauliSum h(n);
  for (int t = 0; t < terms; ++t) {
    PauliString s;
    s.x = static_cast<Mask>(rng.below(std::uint64_t{1} << n));
    if (s.x == 0) s.z = static_cast<Mask>(1 + rng.below((std::uint64_t{1} << n) - 1));
    h.add(s.x ? -std::abs(rng.normal()) : rng.normal(), s);
  }
  return h;
}

}  // namespace

TEST_CASE("f_stoq") {
  CHECK(f_stoq(dense("N=1\n-1 X0")) == 0.0);
  CHECK(f_stoq(dense("N=1\n1 X0")) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(f_stoq(dense("N=2\n1 Z0\n-0.3 Z0 Z1")) == 0.0);
}

TEST_CASE("f_vgp on triangles") {
  CHECK(fvgp_of(parse_hamiltonian(kFerroTriangle), 6) < 1e-15);
  // Two parity sectors, each a complete graph on 4 states with 4 triangles; each
  // triangle has |W| = 1 and theta = pi, contributing 2.
  CHECK(fvgp_of(parse_hamiltonian(kAntiTriangle), 6) == doctest::Approx(16.0));
  CHECK(f_vgp({}) == 0.0);
}

TEST_CASE("f_eta") {
  CHECK(std::abs(f_eta(dense("N=1\n1 X0"), 1.0).value) < 1e-14);
  const auto af = f_eta(dense(kAntiTriangle), 1.0);
  CHECK(af.value > 0.1);
  CHECK(af.relative > 0.0);
  CHECK(f_eta(dense(kAntiTriangle), 0.0).value == 0.0);
  CHECK_THROWS_AS(f_eta(dense(kAntiTriangle), -1.0), ValidationError);
  // direct definition with an independent eigensolver
  const CMatrix m = dense(kAntiTriangle).matrix();
  CMatrix off = m;
  off.diagonal().setZero();
  const CMatrix absoff = off.cwiseAbs().cast<cplx>();
  CHECK(af.value == doctest::Approx(oracle::trace_exp(absoff, 1.0) - oracle::trace_exp(off, -1.0))
                        .epsilon(1e-10));
}

TEST_CASE("M map") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.5;
  d(1, 1) = -0.25;
  const CMatrix md = m_map(HermitianMatrix(d)).matrix();
  CHECK(md(0, 0) == cplx(-1.5));
  CHECK(md(1, 1) == cplx(0.25));
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  CHECK((m_map(dense("N=1\n1 X0")).matrix() - x).norm() == 0.0);
  CHECK((m_map(dense("N=1\n1 Y0")).matrix() - x).norm() == 0.0);
}

TEST_CASE("calF") {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 0.3;
  d(1, 1) = -1.1;
  const CMatrix id = CMatrix::Identity(2, 2);
  CHECK(calF(HermitianMatrix(d), id) == doctest::Approx(std::exp(-0.3) + std::exp(1.1)));
  CHECK(calF(dense("N=1\n1 X0"), id) == doctest::Approx(2.0 * std::cosh(1.0)));
  Rng rng(7);
  const PauliSum h = oracle::random_pauli_sum(3, 6, rng);
  CMatrix phase = CMatrix::Zero(8, 8);
  for (int i = 0; i < 8; ++i) phase(i, i) = std::polar(1.0, 2 * M_PI * rng.uniform());
  CHECK(calF(to_dense(h), phase) == doctest::Approx(calF_identity(to_dense(h))).epsilon(1e-12));
  CHECK_THROWS_AS(calF(to_dense(h), 2.0 * CMatrix::Identity(8, 8)), ValidationError);
}

TEST_CASE("exact average sign") {
  const auto lad = to_dense(heisenberg_ladder(TriangularLadder{6, false}, {}));
  for (double beta : {0.1, 1.0, 3.0}) CHECK(std::abs(exact_avg_sign(lad, beta) - 1.0) < 1e-10);
  const auto af = dense(kAntiTriangle);
  const double s = exact_avg_sign(af, 1.0);
  CHECK(s > 0.0);
  CHECK(s < 1.0);
  CHECK(std::abs(exact_avg_sign(af, 1e-8) - 1.0) < 1e-6);
  CHECK_THROWS_AS(exact_avg_sign(af, 0.0), ValidationError);
}

TEST_CASE("exact average order is the logarithmic derivative in the off-diagonal scale") {
  Rng rng(14);
  const auto h = to_dense(oracle::random_pauli_sum(3, 8, rng));
  const double beta = 0.8, eps = 1e-5;
  auto log_z = [&](double lambda) {
    CMatrix m = m_map(h).matrix();
    CMatrix off = m;
    off.diagonal().setZero();
    m += (lambda - 1.0) * off;
    return std::log(oracle::trace_exp(m, beta));
  };
  const double numeric = (log_z(1 + eps) - log_z(1 - eps)) / (2 * eps);
  CHECK(exact_avg_order(h, beta) == doctest::Approx(numeric).epsilon(1e-6));
}

TEST_CASE("diagnose") {
  const auto h1 = diagnose(h1_model(SquareLattice{2, 2, false}, {1.0}));
  CHECK(h1.vgp);
  CHECK(h1.f_stoq > 0.0);
  CHECK(!h1.witness);

  const auto af = diagnose(parse_hamiltonian(kAntiTriangle));
  CHECK(!af.vgp);
  REQUIRE(af.witness);
  CHECK(af.witness->q() == 3);
  CHECK(af.violating_cycles == 8);

  const auto diag = diagnose(parse_hamiltonian("N=2\n1 Z0\n-0.5 Z0 Z1"));
  CHECK(diag.vgp);
  CHECK(diag.f_stoq == 0.0);
  CHECK(diag.f_vgp == 0.0);
  CHECK(diag.f_eta == 0.0);
  CHECK(diag.exact_avg_sign == doctest::Approx(1.0));

  const auto j = to_json(af);
  CHECK(j["vgp"] == false);
  CHECK(j["witness"]["q"] == 3);
  CHECK(j["witness"]["weight"].size() == 2);
}

TEST_CASE("f_eta is non-negative and vanishes exactly with f_vgp") {
  Rng rng(123);
  int vgp_count = 0, non_vgp = 0;
  for (int t = 0; t < 60; ++t) {
    const int n = 2 + static_cast<int>(rng.below(4));
    PauliSum h = t % 2 ? oracle::random_pauli_sum(n, 2 + static_cast<int>(rng.below(6)), rng)
                       : random_stoquastic(n, 2 + static_cast<int>(rng.below(6)), rng);
    if (t % 4 == 2) {
      PauliString p;
      p.x = static_cast<Mask>(rng.below(std::uint64_t{1} << n));
      p.z = static_cast<Mask>(rng.below(std::uint64_t{1} << n));
      h = conjugate_pauli(h, p);
    }
    const auto fe = f_eta(to_dense(h), 1.0);
    CHECK(fe.relative >= -1e-12);
    const double fv = fvgp_of(h, 1 << n);
    const bool a = fe.relative <= 1e-9, b = fv <= 1e-9;
    CHECK(a == b);
    (a ? vgp_count : non_vgp) += 1;
  }
  CHECK(vgp_count > 10);
  CHECK(non_vgp > 10);
}

TEST_CASE("diagonal-phase and X-string conjugations leave f_eta and f_vgp unchanged") {
  Rng rng(77);
  for (int t = 0; t < 10; ++t) {
    const int n = 3;
    const PauliSum h = oracle::random_pauli_sum(n, 6, rng);
    const HermitianMatrix d = to_dense(h);
    const double fe = f_eta(d, 1.0).value;
    std::vector<double> phases(8);
    for (auto& p : phases) p = 2 * M_PI * rng.uniform();
    CHECK(std::abs(f_eta(conjugate_diagonal(d, phases), 1.0).value - fe) < 1e-9);
    for (Mask m = 0; m < 8; ++m) {
      const PauliSum c = conjugate_xstring(h, m);
      CHECK(std::abs(f_eta(to_dense(c), 1.0).value - fe) < 1e-9);
      CHECK(std::abs(fvgp_of(c, 8) - fvgp_of(h, 8)) < 1e-9);
    }
  }
}

TEST_CASE("no Pauli conjugation cures a non-VGP Hamiltonian") {
  const PauliSum h = parse_hamiltonian(kAntiTriangle);
  for (Mask x = 0; x < 8; ++x)
    for (Mask z = 0; z < 8; ++z) {
      const PauliSum c = conjugate_pauli(h, PauliString{x, z});
      CHECK(f_eta(to_dense(c), 1.0).relative > 1e-9);
    }
}

TEST_CASE("f_eta equals its closed-walk expansion") {
  // Sum over k of eta^k / k! times the sum over closed walks of length k of
  // |W| - Re((-1)^k W), evaluated by propagating amplitudes along PMR edges.
  Rng rng(5);
  const PauliSum h = oracle::random_pauli_sum(3, 6, rng);
  const PMRForm p = pmr_decompose(h);
  const double eta = 0.4;
  const int dim = 8, kmax = 30;
  double series = 0.0;
  for (State z0 = 0; z0 < static_cast<State>(dim); ++z0) {
    std::vector<double> va(dim, 0.0);
    std::vector<cplx> vs(dim, 0.0);
    va[z0] = 1.0;
    vs[z0] = 1.0;
    double fact = 1.0;
    for (int k = 1; k <= kmax; ++k) {
      std::vector<double> na(dim, 0.0);
      std::vector<cplx> ns(dim, 0.0);
      for (State z = 0; z < static_cast<State>(dim); ++z)
        for (int j = 0; j < static_cast<int>(p.offdiag.size()); ++j) {
          const Edge e = edge_weight(p, j, z);
          na[e.to] += std::abs(e.weight) * va[z];
          ns[e.to] += -e.weight * vs[z];
        }
      va = na;
      vs = ns;
      fact *= k;
      series += std::pow(eta, k) / fact * (va[z0] - vs[z0].real());
    }
  }
  CHECK(series == doctest::Approx(f_eta(to_dense(h), eta).value).epsilon(1e-9));
}

TEST_CASE("log of the exact sign decays linearly in beta for the antiferromagnetic triangle") {
  const auto h = to_dense(heisenberg_chain(3, true));
  double prev = 0.0;
  for (double beta = 2.0; beta <= 6.0; beta += 0.5) {
    const double l = std::log(exact_avg_sign(h, beta));
    if (beta > 2.0) CHECK(l < prev);
    prev = l;
  }
}
