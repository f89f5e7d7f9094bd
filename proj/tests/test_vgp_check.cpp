#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "vgp/diagnostics.hpp"
#include "vgp/errors.hpp"
#include "vgp/models.hpp"
#include "vgp/rng.hpp"
#include "vgp/vgp_check.hpp"

using namespace vgp;

namespace {

bool dense_vgp(const PauliSum& h) { return f_eta(to_dense(h), 1.0).relative <= kDefaultVgpTol; }

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

std::vector<TwoLocalBond> triangle(const std::vector<std::array<double, 4>>& h) {
  const int ij[3][2] = {{0, 1}, {1, 2}, {0, 2}};
  std::vector<TwoLocalBond> out;
  for (int e = 0; e < 3; ++e) out.push_back({ij[e][0], ij[e][1], h[e][0], h[e][1], h[e][2], h[e][3]});
  return out;
}

std::vector<TildeHeisBond> tilde_bonds(int n, Rng& rng, double h1_lo, double h1_hi) {
  std::vector<TildeHeisBond> out;
  for (const auto& b : TriangularLadder{n, false}.bonds())
    out.push_back({b.i, b.j, uniform(rng, 0.5, 2.0), uniform(rng, h1_lo, h1_hi)});
  return out;
}

}  // namespace

TEST_CASE("single-flip models by the structural check") {
  for (auto [w, h] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{3, 3}}) {
    const SquareLattice lat{w, h, false};
    const auto v1 = check_dx_vgp(pmr_decompose(h1_model(lat, {1.0})), lat.n_spins());
    CHECK(v1.vgp);
    CHECK(v1.method == VgpMethod::dx_theorem);
    CHECK(v1.statements > 0);
    CHECK(check_dx_vgp(pmr_decompose(h2_model(lat, {0.7})), lat.n_spins()).vgp);
  }
}

TEST_CASE("h_hard outside the inequality fails with a witness") {
  const SquareLattice lat{2, 2, false};
  const PauliSum h = h_hard_model(lat, {HardSite{0.0, 1.0, 2.0}});
  const auto v = check_dx_vgp(pmr_decompose(h), 4);
  CHECK(!v.vgp);
  REQUIRE(!v.violations.empty());
  CHECK(v.violations.front().phase_residue != 0.0);
  CHECK(v.max_violation > kDefaultVgpTol);
  CHECK(f_eta(to_dense(h), 1.0).value > 0.0);
}

TEST_CASE("structural and dense verdicts agree on h_hard draws") {
  Rng rng(31);
  int agree_true = 0, agree_false = 0;
  for (int t = 0; t < 60; ++t) {
    const SquareLattice lat = t % 2 ? SquareLattice{2, 2, false} : SquareLattice{3, 2, false};
    std::vector<HardSite> sites(lat.n_spins());
    const bool real_only = t % 3 == 0;
    for (auto& s : sites) s = {uniform(rng, -1.5, 1.5), real_only ? 0.0 : uniform(rng, -1, 1),
                               uniform(rng, -1, 1)};
    const PauliSum h = h_hard_model(lat, sites);
    const bool structural = check_dx_vgp(pmr_decompose(h), lat.n_spins()).vgp;
    CHECK(structural == dense_vgp(h));
    (structural ? agree_true : agree_false) += 1;
  }
  CHECK(agree_false > 0);
}

TEST_CASE("structural check refuses dependent flip masks") {
  const PMRForm p = pmr_decompose(heisenberg_chain(3, true));
  CHECK_THROWS_AS(check_dx_vgp(p, 3), ValidationError);
}

TEST_CASE("statement count grows linearly with the chain length") {
  std::vector<double> xs, ys;
  for (int n = 4; n <= 12; n += 2) {
    const SquareLattice lat{n, 1, true};
    const auto v = check_dx_vgp(pmr_decompose(h1_model(lat, {1.0})), 3);
    xs.push_back(std::log(n));
    ys.push_back(std::log(static_cast<double>(v.statements)));
  }
  const double slope = (ys.back() - ys.front()) / (xs.back() - xs.front());
  CHECK(slope < 1.2);
  CHECK(slope > 0.5);
}

TEST_CASE("two-local triangle") {
  // modified Heisenberg bond in two-local coordinates: h0 -> -h0, h3 -> +h0
  const auto aligned = check_2local_triangle(triangle({{-1, 0.3, 0.3, 1}, {-1, 0.3, 0.3, 1},
                                                       {-1, 0.3, 0.3, 1}}));
  CHECK(aligned.vgp);
  CHECK(aligned.method == VgpMethod::two_local_triangle);
  // the opposite overall sign frustrates the triangle
  const auto flipped = triangle({{1, 0.3, 0.3, -1}, {1, 0.3, 0.3, -1}, {1, 0.3, 0.3, -1}});
  CHECK(!check_2local_triangle(flipped).vgp);
  CHECK(!dense_vgp(two_local_model(3, flipped)));
  const auto split = check_2local_triangle(triangle({{1, 0.5, -0.5, 0}, {1, 0.5, -0.5, 0},
                                                     {1, 0.5, -0.5, 0}}));
  CHECK(!split.vgp);
  CHECK(!split.violations.empty());
}

TEST_CASE("triangle verdicts agree with dense f_eta") {
  Rng rng(8);
  int positives = 0;
  for (int t = 0; t < 150; ++t) {
    std::vector<std::array<double, 4>> h(3);
    for (auto& e : h) {
      const double s = uniform(rng, -1, 1);
      e = {uniform(rng, -1.5, 1.5), s, t % 2 ? s : uniform(rng, -1, 1), uniform(rng, -1.5, 1.5)};
      if (t % 5 == 0) e[1] = e[2] = 0.0;
    }
    const auto bonds = triangle(h);
    const bool structural = check_2local_triangle(bonds).vgp;
    CHECK(structural == dense_vgp(two_local_model(3, bonds)));
    positives += structural;
  }
  CHECK(positives > 0);
}

TEST_CASE("triangles with h1 != h2 on every edge are never VGP") {
  Rng rng(200);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::array<double, 4>> h(3);
    for (auto& e : h) {
      const double a = uniform(rng, -1, 1);
      double b = uniform(rng, -1, 1);
      if (std::abs(a - b) < 1e-3) b += 0.1;
      e = {uniform(rng, -1.5, 1.5), a, b, uniform(rng, -1.5, 1.5)};
    }
    CHECK(!check_2local_triangle(triangle(h)).vgp);
  }
}

TEST_CASE("modified Heisenberg ladder") {
  Rng rng(34);
  const auto same_sign = check_tilde_heis(6, tilde_bonds(6, rng, 0.1, 1.0));
  CHECK(same_sign.verdict.vgp);
  CHECK(same_sign.verdict.method == VgpMethod::parity_argument);
  CHECK(same_sign.cross_checked);
  CHECK(same_sign.f_eta_relative < 1e-9);

  auto zero = tilde_bonds(6, rng, 0.0, 0.0);
  const auto z = check_tilde_heis(6, zero);
  CHECK(z.verdict.vgp);
  CHECK(z.f_eta_relative < 1e-9);

  auto mixed = tilde_bonds(6, rng, -1.0, 1.0);
  mixed[0].h1 = 0.8;
  mixed[1].h1 = -0.8;
  const auto m = check_tilde_heis(6, mixed);
  CHECK(m.verdict.method == VgpMethod::spectral_fallback);
  CHECK(m.verdict.vgp == dense_vgp(tilde_heis_model(6, mixed)));
  CHECK(m.verdict.vgp == m.verdict.violations.empty());
}

TEST_CASE("gauge consistency agrees with dense f_eta") {
  Rng rng(55);
  CHECK(check_gauge_consistency(pmr_decompose(heisenberg_ladder(TriangularLadder{8, false}, {})))
            .vgp);
  const auto af = check_gauge_consistency(pmr_decompose(heisenberg_chain(3, true)));
  CHECK(!af.vgp);
  CHECK(!af.violations.empty());
  for (int t = 0; t < 40; ++t) {
    const int n = 2 + static_cast<int>(rng.below(4));
    PauliSum h = oracle::random_pauli_sum(n, 1 + static_cast<int>(rng.below(6)), rng);
    CHECK(check_gauge_consistency(pmr_decompose(h)).vgp == dense_vgp(h));
  }
  // VGP by construction: stoquastic ladder under a Pauli conjugation
  const PauliSum lad = heisenberg_ladder(TriangularLadder{6, false}, {});
  const PauliSum rotated = conjugate_pauli(lad, PauliString{0b010101, 0b110011});
  CHECK(check_gauge_consistency(pmr_decompose(rotated)).vgp);
}

TEST_CASE("verdict json") {
  const auto v = check_2local_triangle(triangle({{1, 0.5, -0.5, 0}, {1, 0.5, -0.5, 0},
                                                 {1, 0.5, -0.5, 0}}));
  const auto j = to_json(v);
  CHECK(j["vgp"] == false);
  CHECK(j["method"] == to_string(VgpMethod::two_local_triangle));
  CHECK(j["violations"].is_array());
  CHECK(j["violations"][0].contains("phase_residue"));
}
