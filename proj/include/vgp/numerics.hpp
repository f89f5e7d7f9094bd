#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace vgp {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using Mask = std::uint32_t;   // spin subsets and X-supports; spin l is bit l
using State = std::uint32_t;  // computational basis index, spin 0 least significant

inline int popcount(Mask m) { return __builtin_popcount(m); }
inline int parity(Mask m) { return __builtin_parity(m); }

/// Dense Hermitian matrix. Construction validates Hermiticity.
class HermitianMatrix {
 public:
  /// Rejects input whose largest |A_ij - conj(A_ji)| exceeds `tol`; stores the symmetrized part.
  explicit HermitianMatrix(const CMatrix& m, double tol = 1e-9);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  CMatrix m_;
};

/// Largest entrywise deviation from Hermiticity.
double hermitian_defect(const CMatrix& m);

/// Eigenvalues in ascending order. Disconnected blocks of the sparsity pattern
/// are diagonalized separately and real blocks use a real solver.
std::vector<double> hermitian_eigvals(const HermitianMatrix& a);

struct EigenDecomposition {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // columns are eigenvectors
};
EigenDecomposition hermitian_eigen(const HermitianMatrix& a);

/// tr exp(scale * A), evaluated as exp(log_value). `value` is +inf when it overflows.
struct TraceExp {
  double value;
  double log_value;
};
TraceExp trace_exp(const HermitianMatrix& a, double scale);
TraceExp trace_exp_from_eigvals(const std::vector<double>& eigvals, double scale);

/// log sum_k exp(x_k), stable.
double log_sum_exp(const std::vector<double>& x);

/// Minimal index subsets whose masks XOR to zero with size <= max_size, followed by
/// every {j, j} pair. Index lists are sorted ascending; pairs appear as {j, j}.
std::vector<std::vector<int>> gf2_circuits(const std::vector<Mask>& masks, int max_size);

/// Modified Bessel function of the first kind, order one.
double bessel_i1(double x);

}  // namespace vgp
