#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "json.hpp"
#include "vgp/pauli.hpp"
#include "vgp/rng.hpp"

namespace vgp {

/// Coefficients of D = h0 + i h1 (Z_i + Z_j) + h2 Z_i Z_j on a bond carrying X_i X_j.
struct CellBond {
  double h0 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};

/// 2x2 unit cell, site = x + 2y. Bond 0 joins (0,1), bond 1 joins (2,3), bond 2 joins
/// (0,2), bond 3 joins (1,3). Optional bond 4 is the frustrating diagonal (0,3).
/// `rz_angles` rotate every site of the matching sublattice by R_Z.
struct UnitCellParams {
  std::vector<CellBond> bonds = std::vector<CellBond>(4);
  std::array<double, 4> rz_angles{};

  static UnitCellParams uniform(double h0, double h1, double h2, bool diagonal = false);
  bool has_diagonal() const { return bonds.size() == 5; }
  std::vector<double> to_vector() const;  // 3 values per bond
  static UnitCellParams from_vector(const std::vector<double>& v);
};

/// Lattice of nx by ny cells (2nx by 2ny sites). Horizontal bonds in row y use cell bond
/// y mod 2 and vertical bonds in column x use bond 2 + x mod 2, so the operator repeats
/// under translation by one cell. Directions of length 3 or more wrap around.
PauliSum tile_periodic(const UnitCellParams& params, int nx, int ny);

/// Relative f_eta of the single cell at eta = 1.
double unit_cell_f_eta(const UnitCellParams& params);

/// Largest and smallest bond norm sqrt(h0^2 + 2 h1^2 + h2^2).
std::pair<double, double> bond_norm_range(const UnitCellParams& params);
/// All bonds vanish (max norm < 1e-6) or one bond is negligible next to the others
/// (min/max < 1e-3).
bool is_degenerate(const UnitCellParams& params);

struct OptimizeOptions {
  double tol = 1e-9;
  int max_restarts = 8;
  int max_iters = 4000;  // Nelder-Mead iterations per restart
  bool polish = true;    // Levenberg-Marquardt on cycle phases after the simplex search
};

struct OptimizeResult {
  UnitCellParams params;
  double f_eta = 0.0;  // relative, eta = 1
  bool converged = false;
  bool degenerate = false;
  int restarts = 0;
};

/// Nelder-Mead over the bond coefficients minimizing the cell's relative f_eta, restarted
/// from random points until the value drops below tol.
OptimizeResult optimize_unit_cell(const UnitCellParams& init, const OptimizeOptions& opts, Rng& rng);

/// Draws one R_Z angle per sublattice site, uniform in [0, 2 pi).
UnitCellParams apply_rz_rotation(const UnitCellParams& params, Rng& rng);

struct Tiling {
  int nx = 1;
  int ny = 1;
};

struct ConjectureOptions {
  int instances = 50;      // converged nondegenerate cells to test
  int max_attempts = 200;  // optimizer runs allowed to reach that count
  std::vector<Tiling> tilings{{2, 1}, {1, 2}, {2, 2}};
  double tol = 1e-8;
  int dense_cap = 12;       // larger tilings use the gauge-consistency test
  double gauge_tol = 1e-9;  // bound on |w| (1 - cos r) in the gauge-consistency test
  OptimizeOptions optimize;
};

struct InstanceResult {
  std::uint64_t seed = 0;
  bool unit_pass = false;
  bool tiled_pass = false;
  double unit_f_eta = 0.0;
  std::vector<double> tiled_f_eta;       // relative f_eta, or -1 when the gauge test was used
  std::vector<double> tiled_violation;   // largest gauge violation, or -1 when dense
};

/// Rotated-cell checks: the cell itself, then every tiling.
InstanceResult evaluate_cell(const UnitCellParams& rotated, const ConjectureOptions& opts);

struct ConjectureReport {
  int attempts = 0;
  int instances = 0;  // converged nondegenerate cells
  int unit_pass = 0;
  int tiled_pass = 0;
  double max_tiled_f_eta = 0.0;
  double max_gauge_violation = 0.0;
  double tol = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<InstanceResult> results;
};

ConjectureReport verify_conjecture(const ConjectureOptions& opts, std::uint64_t seed);

nlohmann::json to_json(const ConjectureReport& r);

}  // namespace vgp
