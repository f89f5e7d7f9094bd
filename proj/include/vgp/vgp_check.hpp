#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "vgp/diagnostics.hpp"
#include "vgp/models.hpp"
#include "vgp/pmr.hpp"

namespace vgp {

enum class VgpMethod { dx_theorem, two_local_triangle, parity_argument, gauge_consistency,
                       spectral_fallback };
std::string to_string(VgpMethod m);

struct Violation {
  std::string description;
  Mask sites = 0;        // spins involved
  State alpha = 0;       // assignment where the failing walk starts
  State alpha_prime = 0;  // assignment where the inconsistency is detected
  double phase_residue = 0.0;
};

struct VgpVerdict {
  bool vgp = true;
  VgpMethod method = VgpMethod::spectral_fallback;
  std::vector<Violation> violations;
  std::size_t statements = 0;  // elementary phase conditions evaluated
  double max_violation = 0.0;  // largest |w| (1 - cos r) over closing edges
};

/// Structural test for Hamiltonians whose X-masks are GF(2)-independent (for instance
/// sums of single-spin D_i X_i). Every connected set of at most `depth` interacting terms
/// spans a small hypercube of basis states for each assignment of the spins it touches;
/// each such cube is checked for a consistent gauge. `k` bounds the size of every D_j support.
/// Refuses (ValidationError naming the circuit) when the masks have a nontrivial circuit.
VgpVerdict check_dx_vgp(const PMRForm& p, int k, int depth = 2);

/// Three edges (i,j), (j,k), (i,k) with D = h0 + i(h1 Z_i + h2 Z_j) + h3 Z_iZ_j each.
/// Rejects outright when h1 != h2 on every edge; otherwise evaluates every length-3
/// and alternating length-4 closed walk over all 8 assignments of the triangle.
VgpVerdict check_2local_triangle(const std::vector<TwoLocalBond>& edges);

/// Modified Heisenberg model: VGP by the parity argument when every h0 > 0 and all h1
/// share one sign (zeros allowed). Otherwise, and for cross-validation when the model
/// is small enough, decides by dense f_eta.
struct TildeHeisCheck {
  VgpVerdict verdict;
  bool cross_checked = false;
  double f_eta_relative = 0.0;
};
TildeHeisCheck check_tilde_heis(int n_spins, const std::vector<TildeHeisBond>& bonds,
                                int cross_check_cap = 8, double tol = kDefaultVgpTol);

/// VGP test on the full state graph without dense matrices: a gauge phi with
/// -H_ab = |H_ab| exp(i(phi_a - phi_b)) exists iff every cycle satisfies the phase condition.
/// phi is fixed along a maximum-weight spanning tree; each remaining edge with residue r
/// violates when |H_ab| (1 - cos r) > tol. Cost is near-linear in basis states times terms.
VgpVerdict check_gauge_consistency(const PMRForm& p, double tol = kDefaultVgpTol);

nlohmann::json to_json(const VgpVerdict& v);

}  // namespace vgp
