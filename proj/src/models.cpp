#include "vgp/models.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "vgp/errors.hpp"
#include "vgp/vgp_search.hpp"

namespace vgp {

namespace {

Mask bit(int s) { return Mask{1} << s; }

void check_bond(const Bond& b, int n) {
  if (b.i < 0 || b.j < 0 || b.i >= n || b.j >= n || b.i == b.j)
    throw ValidationError(fmt::format("bond ({}, {}) is invalid for {} spins", b.i, b.j, n));
}

void add_heisenberg_pair(OperatorBuilder& ops, int i, int j, double coeff) {
  const Mask m = bit(i) | bit(j);
  ops.add_zx(coeff, 0, m);                 // X_i X_j
  ops.add_zx(-coeff, m, m);                // Y_i Y_j = (i Z_i X_i)(i Z_j X_j) written as -Z_iZ_j X_iX_j
  ops.add_zx(coeff, m, 0);                 // Z_i Z_j
}

}  // namespace

int TriangularLadder::plaquettes() const { return periodic ? rungs() : rungs() - 1; }

std::vector<Bond> TriangularLadder::bonds() const {
  if (n_spins < 4 || n_spins % 2 != 0)
    throw ValidationError(fmt::format("ladder needs an even number of spins >= 4, got {}", n_spins));
  if (periodic && rungs() < 3) throw ValidationError("periodic ladder needs at least 3 rungs");
  std::vector<Bond> out;
  const int L = rungs();
  for (int k = 0; k < L; ++k) out.push_back({2 * k, 2 * k + 1});
  for (int k = 0; k < plaquettes(); ++k) {
    const int a = 2 * k, b = (2 * k + 2) % n_spins;
    out.push_back({std::min(a, b), std::max(a, b)});
    out.push_back({std::min(a + 1, b + 1), std::max(a + 1, b + 1)});
  }
  for (const auto& d : diagonals()) out.push_back(d);
  return out;
}

std::vector<Bond> TriangularLadder::diagonals() const {
  std::vector<Bond> out;
  for (int k = 0; k < plaquettes(); ++k) {
    const int a = 2 * k + 1, b = (2 * k + 2) % n_spins;
    out.push_back({std::min(a, b), std::max(a, b)});
  }
  return out;
}

std::vector<std::vector<int>> TriangularLadder::triangles() const {
  std::vector<std::vector<int>> out;
  for (int k = 0; k < plaquettes(); ++k) {
    const int a = 2 * k, b = 2 * k + 1, c = (2 * k + 2) % n_spins, d = (2 * k + 3) % n_spins;
    out.push_back({a, b, c});  // rung k, lower leg, diagonal
    out.push_back({b, c, d});  // diagonal, upper leg, rung k+1
  }
  return out;
}

std::vector<int> default_defect_plaquettes(const TriangularLadder& lattice, int n_defects) {
  const int p = lattice.plaquettes();
  if (n_defects < 0 || n_defects > p)
    throw ValidationError(fmt::format("cannot place {} defects on {} plaquettes", n_defects, p));
  std::vector<int> out;
  for (int k = 0; k < n_defects; ++k) {
    const double pos = static_cast<double>((k + 1) * (p + 1)) / (n_defects + 1);
    out.push_back(std::clamp(static_cast<int>(std::lround(pos)) - 1, 0, p - 1));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PauliSum heisenberg_ladder(const TriangularLadder& lattice, const std::vector<int>& defects,
                           double coupling) {
  OperatorBuilder ops(lattice.n_spins);
  for (const auto& b : lattice.bonds()) add_heisenberg_pair(ops, b.i, b.j, -coupling);
  const auto diag = lattice.diagonals();
  for (int d : defects) {
    if (d < 0 || d >= static_cast<int>(diag.size()))
      throw ValidationError(fmt::format("defect plaquette {} out of range", d));
    add_heisenberg_pair(ops, diag[d].i, diag[d].j, 2.0);
  }
  return ops.build();
}

PauliSum heisenberg_chain(int n_spins, bool periodic, double coupling) {
  if (n_spins < 2 || n_spins > 32)
    throw ValidationError(fmt::format("chain needs 2 to 32 spins, got {}", n_spins));
  OperatorBuilder ops(n_spins);
  for (int i = 0; i + 1 < n_spins; ++i) add_heisenberg_pair(ops, i, i + 1, coupling);
  if (periodic && n_spins >= 3) add_heisenberg_pair(ops, 0, n_spins - 1, coupling);
  return ops.build();
}

int SquareLattice::site(int x, int y) const { return x + width * y; }

std::vector<Bond> SquareLattice::bonds() const {
  if (width < 1 || height < 1 || width * height < 2 || width * height > 32)
    throw ValidationError(fmt::format("invalid square lattice {}x{}", width, height));
  std::vector<Bond> out;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const int s = site(x, y);
      if (x + 1 < width) out.push_back({s, site(x + 1, y)});
      else if (periodic && width >= 3) out.push_back({site(0, y), s});
      if (y + 1 < height) out.push_back({s, site(x, y + 1)});
      else if (periodic && height >= 3) out.push_back({site(x, 0), s});
    }
  return out;
}

std::vector<int> SquareLattice::neighbors(int s) const {
  std::vector<int> out;
  for (const auto& b : bonds()) {
    if (b.i == s) out.push_back(b.j);
    if (b.j == s) out.push_back(b.i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

template <typename T>
std::vector<T> expand(const std::vector<T>& v, std::size_t n, const char* what) {
  if (v.size() == 1) return std::vector<T>(n, v.front());
  if (v.size() != n)
    throw ValidationError(fmt::format("{}: expected 1 or {} values, got {}", what, n, v.size()));
  return v;
}

Mask neighbor_mask(const SquareLattice& lattice, int s) {
  Mask m = 0;
  for (int j : lattice.neighbors(s)) m |= bit(j);
  return m;
}

}  // namespace

PauliSum h1_model(const SquareLattice& lattice, const std::vector<double>& couplings) {
  const auto bonds = lattice.bonds();
  const auto J = expand(couplings, bonds.size(), "h1 couplings");
  OperatorBuilder ops(lattice.n_spins());
  for (std::size_t e = 0; e < bonds.size(); ++e) {
    ops.add_zx(J[e], 0, bit(bonds[e].i));
    ops.add_zx(J[e], bit(bonds[e].j), bit(bonds[e].i));
  }
  return ops.build();
}

PauliSum h2_model(const SquareLattice& lattice, const std::vector<double>& fields) {
  const int n = lattice.n_spins();
  const auto J = expand(fields, static_cast<std::size_t>(n), "h2 fields");
  OperatorBuilder ops(n);
  for (int s = 0; s < n; ++s) ops.add_zx(J[s], neighbor_mask(lattice, s), bit(s));
  return ops.build();
}

PauliSum h_hard_model(const SquareLattice& lattice, const std::vector<HardSite>& sites) {
  const int n = lattice.n_spins();
  const auto p = expand(sites, static_cast<std::size_t>(n), "h_hard sites");
  OperatorBuilder ops(n);
  for (int s = 0; s < n; ++s) {
    ops.add_zx(p[s].a, 0, bit(s));
    ops.add_zx(cplx(0.0, p[s].b), bit(s), bit(s));
    ops.add_zx(p[s].c, neighbor_mask(lattice, s), bit(s));
  }
  return ops.build();
}

void add_two_local(OperatorBuilder& ops, const TwoLocalBond& b) {
  const Mask m = bit(b.i) | bit(b.j);
  ops.add_zx(b.h0, 0, m);
  ops.add_zx(cplx(0.0, b.h1), bit(b.i), m);
  ops.add_zx(cplx(0.0, b.h2), bit(b.j), m);
  ops.add_zx(b.h3, m, m);
}

PauliSum two_local_model(int n_spins, const std::vector<TwoLocalBond>& bonds) {
  OperatorBuilder ops(n_spins);
  for (const auto& b : bonds) {
    check_bond({b.i, b.j}, n_spins);
    add_two_local(ops, b);
  }
  return ops.build();
}

TwoLocalBond to_two_local(const TildeHeisBond& b) { return {b.i, b.j, -b.h0, b.h1, b.h1, b.h0}; }

PauliSum tilde_heis_model(int n_spins, const std::vector<TildeHeisBond>& bonds) {
  OperatorBuilder ops(n_spins);
  for (const auto& b : bonds) {
    check_bond({b.i, b.j}, n_spins);
    add_two_local(ops, to_two_local(b));
    ops.add_zx(-b.h0, bit(b.i) | bit(b.j), 0);
  }
  return ops.build();
}

double ModelSpec::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::vector<std::string> model_names() {
  return {"heisenberg_ladder", "heisenberg_chain", "h1",      "h2",
          "h_hard",            "tilde_heis",       "unit_cell_2local"};
}

PauliSum build_model(const ModelSpec& spec) {
  const auto square = [&]() {
    if (spec.width < 1 || spec.height < 1)
      throw ValidationError(fmt::format("model '{}' needs a lattice WxH", spec.name));
    return SquareLattice{spec.width, spec.height, spec.periodic};
  };
  const auto ladder = [&]() { return TriangularLadder{spec.n_spins, spec.periodic}; };

  if (spec.name == "heisenberg_ladder") {
    const auto lat = ladder();
    return heisenberg_ladder(lat, default_defect_plaquettes(lat, spec.defects),
                             spec.param("J", 1.0));
  }
  if (spec.name == "heisenberg_chain")
    return heisenberg_chain(spec.n_spins, spec.periodic, spec.param("J", 1.0));
  if (spec.name == "h1") return h1_model(square(), {spec.param("J", 1.0)});
  if (spec.name == "h2") return h2_model(square(), {spec.param("J", 1.0)});
  if (spec.name == "h_hard")
    return h_hard_model(square(),
                        {HardSite{spec.param("a", 1.0), spec.param("b", 0.0), spec.param("c", 0.0)}});
  if (spec.name == "tilde_heis") {
    const auto lat = ladder();
    std::vector<TildeHeisBond> bonds;
    for (const auto& b : lat.bonds())
      bonds.push_back({b.i, b.j, spec.param("h0", 1.0), spec.param("h1", 0.5)});
    return tilde_heis_model(lat.n_spins, bonds);
  }
  if (spec.name == "unit_cell_2local") {
    UnitCellParams cell = UnitCellParams::uniform(spec.param("h0", -1.0), spec.param("h1", 0.5),
                                                  spec.param("h2", 1.0));
    const int nx = spec.width > 0 ? spec.width : 1;
    const int ny = spec.height > 0 ? spec.height : 1;
    return tile_periodic(cell, nx, ny);
  }
  throw ValidationError(fmt::format("unknown model '{}'", spec.name));
}

}  // namespace vgp
