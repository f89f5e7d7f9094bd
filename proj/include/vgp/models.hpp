#pragma once

#include <map>
#include <string>
#include <vector>

#include "vgp/pauli.hpp"

namespace vgp {

struct Bond {
  int i = 0;
  int j = 0;
  friend bool operator==(const Bond&, const Bond&) = default;
};

/// Two-leg ladder with one diagonal per plaquette. Rung k joins sites 2k and 2k+1,
/// legs join 2k-2(k+1) and (2k+1)-(2k+3), and plaquette k carries the diagonal (2k+1)-(2k+2).
struct TriangularLadder {
  int n_spins = 4;
  bool periodic = false;

  int rungs() const { return n_spins / 2; }
  int plaquettes() const;
  std::vector<Bond> bonds() const;  // rungs, legs, diagonals
  std::vector<Bond> diagonals() const;
  /// Site triples of every triangle, each triangle listed once.
  std::vector<std::vector<int>> triangles() const;
};

/// Plaquette indices hosting `n_defects` defect diagonals: one defect sits in the middle,
/// several are spread evenly between the two ends.
std::vector<int> default_defect_plaquettes(const TriangularLadder& lattice, int n_defects);

/// H = -J sum S_i.S_j over all ladder bonds plus 2 sum S_i.S_j over the defect diagonals,
/// with S_i.S_j written as X_iX_j + Y_iY_j + Z_iZ_j.
PauliSum heisenberg_ladder(const TriangularLadder& lattice, const std::vector<int>& defects,
                           double coupling = 1.0);

/// J sum S_i.S_{i+1} on an open chain, closed into a ring when `periodic` and N >= 3.
/// N = 3 periodic is the antiferromagnetic triangle for J > 0.
PauliSum heisenberg_chain(int n_spins, bool periodic, double coupling = 1.0);

/// W x H square lattice, site = x + W*y. Periodic wrap applies only along directions of
/// length three or more, so no pair of sites is bonded twice.
struct SquareLattice {
  int width = 2;
  int height = 2;
  bool periodic = false;

  int n_spins() const { return width * height; }
  int site(int x, int y) const;
  std::vector<Bond> bonds() const;  // each bond once, i < j
  std::vector<int> neighbors(int s) const;
};

/// sum over bonds (i < j) of J_ij (1 + Z_j) X_i.
PauliSum h1_model(const SquareLattice& lattice, const std::vector<double>& couplings);
/// sum_i J_i (prod_{j ~ i} Z_j) X_i.
PauliSum h2_model(const SquareLattice& lattice, const std::vector<double>& fields);

struct HardSite {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};
/// sum_i D_i X_i with D_i = a_i + i b_i Z_i + c_i prod_{j ~ i} Z_j.
PauliSum h_hard_model(const SquareLattice& lattice, const std::vector<HardSite>& sites);

/// Pair term D_ij X_iX_j with D_ij = h0 + i (h1 Z_i + h2 Z_j) + h3 Z_iZ_j.
struct TwoLocalBond {
  int i = 0;
  int j = 1;
  double h0 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;
};
PauliSum two_local_model(int n_spins, const std::vector<TwoLocalBond>& bonds);
void add_two_local(OperatorBuilder& b, const TwoLocalBond& bond);

/// Modified Heisenberg pair term: h0 (Z_iZ_j - 1) + i h1 (Z_i + Z_j) on X_iX_j,
/// plus the diagonal -h0 Z_iZ_j.
struct TildeHeisBond {
  int i = 0;
  int j = 1;
  double h0 = 1.0;
  double h1 = 0.0;
};
PauliSum tilde_heis_model(int n_spins, const std::vector<TildeHeisBond>& bonds);
TwoLocalBond to_two_local(const TildeHeisBond& b);

/// Named model with uniform parameters, as used by the command-line tool.
struct ModelSpec {
  std::string name;  // see model_names()
  int n_spins = 0;   // ladders and chains
  int width = 0;     // square lattices
  int height = 0;
  bool periodic = false;
  int defects = 0;
  std::map<std::string, double> params;

  double param(const std::string& key, double fallback) const;
};
PauliSum build_model(const ModelSpec& spec);
std::vector<std::string> model_names();

}  // namespace vgp
