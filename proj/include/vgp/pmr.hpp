#pragma once

#include <utility>
#include <vector>

#include "json.hpp"
#include "vgp/numerics.hpp"
#include "vgp/pauli.hpp"

namespace vgp {

/// Diagonal operator sum_S h_S prod_{l in S} Z_l with complex coefficients.
struct ZPolynomial {
  std::vector<std::pair<Mask, cplx>> terms;  // distinct masks, ascending

  void add(Mask z_mask, cplx coeff);
  Mask support() const;
  friend bool operator==(const ZPolynomial&, const ZPolynomial&) = default;
};

/// Value of the diagonal operator on basis state z (bit l set means Z_l = -1).
cplx eval_diagonal(const ZPolynomial& d, State z);

struct OffDiagonalTerm {
  Mask x_mask = 0;  // nonzero
  ZPolynomial d;
};

/// H = D_0 + sum_j D_j P_j, where P_j flips the spins in x_mask.
struct PMRForm {
  int n_spins = 0;
  ZPolynomial d0;
  std::vector<OffDiagonalTerm> offdiag;  // distinct x masks, ascending

  std::vector<Mask> x_masks() const;
};

/// Groups Pauli terms by X-support; each Y letter contributes -i Z at its site.
PMRForm pmr_decompose(const PauliSum& h);

HermitianMatrix pmr_to_dense(const PMRForm& p, int cap = kDefaultDenseCap);

struct Edge {
  State to;
  cplx weight;  // <to| D_j P_j |from>
};
/// Transition of basis state z under term j.
Edge edge_weight(const PMRForm& p, int j, State z);

nlohmann::json to_json(const PMRForm& p);

}  // namespace vgp
