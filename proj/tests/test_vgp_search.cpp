#include <cmath>
#include <numbers>

#include "doctest.h"
#include "vgp/diagnostics.hpp"
#include "vgp/errors.hpp"
#include "vgp/pmr.hpp"
#include "vgp/vgp_check.hpp"
#include "vgp/vgp_search.hpp"

using namespace vgp;

namespace {

// Phase vector of prod_s exp(-i a_s Z_s / 2) on a 2W x 2H tiling.
std::vector<double> rz_phases(const UnitCellParams& c, int w, int h) {
  std::vector<double> out(std::size_t{1} << (w * h), 0.0);
  for (std::size_t z = 0; z < out.size(); ++z)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const int s = x + w * y;
        const double zval = (z >> s & 1) ? -1.0 : 1.0;
        out[z] -= 0.5 * c.rz_angles[(x % 2) + 2 * (y % 2)] * zval;
      }
  return out;
}

CMatrix translation(int w, int h, int dx, int dy) {
  const int n = w * h;
  CMatrix t = CMatrix::Zero(1 << n, 1 << n);
  for (State z = 0; z < (State{1} << n); ++z) {
    State img = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (z >> (x + w * y) & 1) img |= State{1} << (((x + dx) % w) + w * ((y + dy) % h));
    t(img, z) = 1.0;
  }
  return t;
}

UnitCellParams random_cell(Rng& rng) {
  std::vector<double> v(12);
  for (double& x : v) x = rng.normal();
  return UnitCellParams::from_vector(v);
}

}  // namespace

TEST_CASE("parameter vectors") {
  Rng rng(1);
  const UnitCellParams c = random_cell(rng);
  CHECK(UnitCellParams::from_vector(c.to_vector()).to_vector() == c.to_vector());
  CHECK(UnitCellParams::uniform(1, 2, 3, true).to_vector().size() == 15);
  CHECK_THROWS_AS(UnitCellParams::from_vector(std::vector<double>(11, 0.0)), ValidationError);
}

TEST_CASE("tiling counts") {
  const UnitCellParams c = UnitCellParams::uniform(-1.0, 0.4, 0.7);
  const PMRForm unit = pmr_decompose(tile_periodic(c, 1, 1));
  CHECK(unit.n_spins == 4);
  CHECK(unit.offdiag.size() == 4);
  // 4 x 2 sites: horizontal rings of length 4 carry 4 bonds per row, open vertical columns 1 each
  const PMRForm wide = pmr_decompose(tile_periodic(c, 2, 1));
  CHECK(wide.n_spins == 8);
  CHECK(wide.offdiag.size() == 12);
  CHECK(pmr_decompose(tile_periodic(c, 1, 2)).offdiag.size() == 12);
  CHECK(pmr_decompose(tile_periodic(UnitCellParams::uniform(-1.0, 0.4, 0.7, true), 1, 1)).offdiag.size() == 5);
  CHECK_THROWS_AS(tile_periodic(c, 3, 3), GuardError);
  CHECK_THROWS_AS(tile_periodic(c, 0, 1), ValidationError);
}

TEST_CASE("tilings commute with translation by one cell") {
  Rng rng(2);
  UnitCellParams c = apply_rz_rotation(random_cell(rng), rng);
  const CMatrix hx = to_dense(tile_periodic(c, 2, 1)).matrix();
  const CMatrix tx = translation(4, 2, 2, 0);
  CHECK((tx * hx * tx.adjoint() - hx).norm() < 1e-12);
  const CMatrix hy = to_dense(tile_periodic(c, 1, 2)).matrix();
  const CMatrix ty = translation(2, 4, 0, 2);
  CHECK((ty * hy * ty.adjoint() - hy).norm() < 1e-12);
  // a one-site shift breaks the sublattice pattern
  const CMatrix t1 = translation(4, 2, 1, 0);
  CHECK((t1 * hx * t1.adjoint() - hx).norm() > 1e-3);
}

TEST_CASE("R_Z rotation is a diagonal conjugation") {
  Rng rng(3);
  const UnitCellParams c = random_cell(rng);
  const UnitCellParams r = apply_rz_rotation(c, rng);
  for (double a : r.rz_angles) {
    CHECK(a >= 0.0);
    CHECK(a < 2 * std::numbers::pi);
  }
  CHECK(r.to_vector() == c.to_vector());
  const HermitianMatrix plain = to_dense(tile_periodic(c, 2, 1));
  const HermitianMatrix rotated = to_dense(tile_periodic(r, 2, 1));
  CHECK((conjugate_diagonal(plain, rz_phases(r, 4, 2)).matrix() - rotated.matrix()).norm() < 1e-10);
  CHECK(std::abs(unit_cell_f_eta(r) - unit_cell_f_eta(c)) < 1e-10);

  UnitCellParams pi = c;
  pi.rz_angles = {std::numbers::pi, std::numbers::pi, std::numbers::pi, std::numbers::pi};
  CHECK((to_dense(tile_periodic(pi, 1, 1)).matrix() - to_dense(tile_periodic(c, 1, 1)).matrix()).norm() <
        1e-12);
}

TEST_CASE("degeneracy") {
  CHECK(is_degenerate(UnitCellParams{}));
  UnitCellParams c = UnitCellParams::uniform(1.0, 0.2, -0.5);
  CHECK(!is_degenerate(c));
  c.bonds[2] = {1e-5, 0.0, 0.0};
  CHECK(is_degenerate(c));
  const auto [lo, hi] = bond_norm_range(UnitCellParams::uniform(1.0, 1.0, 1.0));
  CHECK(lo == doctest::Approx(2.0));
  CHECK(hi == doctest::Approx(2.0));
}

TEST_CASE("modified Heisenberg cells are already VGP") {
  for (double h1 : {0.3, -0.7}) {
    const UnitCellParams c = UnitCellParams::uniform(1.0, h1, -1.0);
    CHECK(unit_cell_f_eta(c) < 1e-9);
    Rng rng(4);
    const OptimizeResult r = optimize_unit_cell(c, {}, rng);
    CHECK(r.converged);
    CHECK(r.restarts == 0);
    CHECK(r.params.to_vector() == c.to_vector());
  }
}

TEST_CASE("zero cell is flagged degenerate") {
  CHECK(unit_cell_f_eta(UnitCellParams{}) == 0.0);
  Rng rng(5);
  OptimizeOptions opts;
  opts.max_restarts = 0;
  const OptimizeResult r = optimize_unit_cell(UnitCellParams{}, opts, rng);
  // the start itself is rejected; whatever the search returns as converged is nondegenerate
  CHECK(!(r.converged && r.degenerate));
  CHECK(r.params.to_vector() != UnitCellParams{}.to_vector());
}

TEST_CASE("random restarts find a nondegenerate VGP cell deterministically") {
  Rng r1(6), r2(6);
  OptimizeOptions opts;
  opts.max_restarts = 50;
  const UnitCellParams init = random_cell(r1);
  random_cell(r2);
  const OptimizeResult a = optimize_unit_cell(init, opts, r1);
  const OptimizeResult b = optimize_unit_cell(init, opts, r2);
  REQUIRE(a.converged);
  CHECK(!a.degenerate);
  CHECK(a.f_eta < 1e-9);
  CHECK(a.params.to_vector() == b.params.to_vector());
  CHECK(a.restarts == b.restarts);
}

TEST_CASE("cell evaluation") {
  ConjectureOptions opts;
  opts.tilings = {{2, 1}, {1, 2}, {2, 2}};
  Rng rng(7);
  const UnitCellParams good = apply_rz_rotation(UnitCellParams::uniform(1.0, 0.4, -1.0), rng);
  const InstanceResult r = evaluate_cell(good, opts);
  CHECK(r.unit_pass);
  CHECK(r.tiled_pass);
  REQUIRE(r.tiled_f_eta.size() == 3);
  CHECK(r.tiled_f_eta[0] >= -1e-12);
  CHECK(r.tiled_f_eta[2] == -1.0);  // 16 spins: decided by the gauge test
  CHECK(r.tiled_violation[2] >= 0.0);

  const UnitCellParams bad = UnitCellParams::uniform(0.3, 0.7, 0.1, true);
  REQUIRE(unit_cell_f_eta(bad) > 1e-6);
  const InstanceResult rb = evaluate_cell(bad, opts);
  CHECK(!rb.unit_pass);
  CHECK(!check_gauge_consistency(pmr_decompose(tile_periodic(bad, 1, 1))).vgp);
}

TEST_CASE("conjecture pipeline at small scale") {
  ConjectureOptions opts;
  opts.instances = 2;
  opts.max_attempts = 10;
  opts.tilings = {{2, 1}, {1, 2}};
  const ConjectureReport a = verify_conjecture(opts, 42);
  CHECK(a.instances == 2);
  CHECK(a.unit_pass == a.instances);
  CHECK(a.tiled_pass == a.unit_pass);
  CHECK(a.max_tiled_f_eta < opts.tol);
  CHECK(a.seeds.size() == static_cast<std::size_t>(a.instances));
  const ConjectureReport b = verify_conjecture(opts, 42);
  CHECK(b.seeds == a.seeds);
  CHECK(b.max_tiled_f_eta == a.max_tiled_f_eta);
  const auto j = to_json(a);
  for (const char* k : {"instances", "unit_pass", "tiled_pass", "max_tiled_f_eta", "tol", "seeds"})
    CHECK(j.contains(k));
}
