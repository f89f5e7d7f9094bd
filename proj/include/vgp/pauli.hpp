#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vgp/numerics.hpp"

namespace vgp {

inline constexpr int kDefaultDenseCap = 12;

/// Pauli letters as two bitmasks: X on x-only sites, Z on z-only sites, Y where both are set.
struct PauliString {
  Mask x = 0;
  Mask z = 0;

  char letter(int site) const;
  Mask support() const { return x | z; }
  int y_count() const { return popcount(x & z); }
  friend bool operator==(const PauliString&, const PauliString&) = default;
};

/// Orders strings by their letter sequence read from spin 0 upward (I < X < Y < Z).
bool pattern_less(const PauliString& a, const PauliString& b, int n_spins);

struct PauliTerm {
  double coeff = 0.0;
  PauliString ops;
};

/// Real-weighted sum of Pauli strings. Terms have distinct patterns, nonzero finite
/// coefficients, and are kept sorted by pattern.
class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(int n_spins);

  int n_spins() const { return n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

  /// Adds coeff * ops, merging with an existing term of the same pattern.
  void add(double coeff, PauliString ops);
  /// Drops terms with |coeff| <= tol.
  void prune(double tol = 0.0);

  friend bool operator==(const PauliSum& a, const PauliSum& b);

 private:
  int n_ = 0;
  std::vector<PauliTerm> terms_;
};

/// Text grammar: '#' comments, "N=<int>" once as the first non-comment line, then
/// one term per line as a real coefficient followed by letter-site tokens (e.g. "X0 Y3").
PauliSum parse_hamiltonian(std::string_view text);
std::string serialize(const PauliSum& h);

/// Dense matrix in the computational basis: index bit l is spin l, bit 0 means Z = +1.
HermitianMatrix to_dense(const PauliSum& h, int cap = kDefaultDenseCap);

/// Phi H Phi^dagger with Phi = diag(exp(i phases)).
HermitianMatrix conjugate_diagonal(const HermitianMatrix& h, const std::vector<double>& phases);
HermitianMatrix conjugate_diagonal(const PauliSum& h, const std::vector<double>& phases);

/// P H P with P the product of X over `mask`: Y and Z letters on masked sites flip sign.
PauliSum conjugate_xstring(const PauliSum& h, Mask mask);

/// Conjugation by an arbitrary Pauli string (sign flips wherever the letters anticommute).
PauliSum conjugate_pauli(const PauliSum& h, const PauliString& p);

/// Accumulates operators of the form c * Z_S X_T with complex c and rewrites them
/// as real-coefficient Pauli strings (Z_l X_l = i Y_l).
class OperatorBuilder {
 public:
  explicit OperatorBuilder(int n_spins);
  void add_zx(cplx coeff, Mask z_mask, Mask x_mask);
  /// Fails if the accumulated operator is not Hermitian beyond `tol`.
  PauliSum build(double tol = 1e-12) const;

 private:
  struct Entry {
    PauliString ops;
    cplx coeff;
  };
  int n_;
  std::vector<Entry> entries_;
};

}  // namespace vgp
