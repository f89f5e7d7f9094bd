#include "vgp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "vgp/errors.hpp"

namespace vgp {

double hermitian_defect(const CMatrix& m) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
  return worst;
}

HermitianMatrix::HermitianMatrix(const CMatrix& m, double tol) {
  if (m.rows() < 1 || m.rows() != m.cols())
    throw ValidationError(fmt::format("Hermitian matrix must be square and nonempty, got {}x{}",
                                      m.rows(), m.cols()));
  const double defect = hermitian_defect(m);
  if (defect > tol)
    throw ValidationError(fmt::format("matrix is not Hermitian: max |A_ij - conj(A_ji)| = {:.3e}",
                                      defect));
  m_ = 0.5 * (m + m.adjoint());
}

namespace {

// Connected components of the nonzero pattern; each component is a sorted index list.
std::vector<std::vector<Eigen::Index>> pattern_blocks(const CMatrix& m) {
  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i)
      if (m(i, j) != cplx(0.0, 0.0)) {
        const auto a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::Index> slot(n, -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<Eigen::Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[r]].push_back(i);
  }
  return blocks;
}

void append_block_eigvals(const CMatrix& m, const std::vector<Eigen::Index>& idx,
                          std::vector<double>& out) {
  const auto k = static_cast<Eigen::Index>(idx.size());
  if (k == 1) {
    out.push_back(m(idx[0], idx[0]).real());
    return;
  }
  bool real = true;
  for (Eigen::Index a = 0; a < k && real; ++a)
    for (Eigen::Index b = 0; b < k; ++b)
      if (m(idx[a], idx[b]).imag() != 0.0) {
        real = false;
        break;
      }
  if (real) {
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = m(idx[a], idx[b]).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
    for (Eigen::Index a = 0; a < k; ++a) out.push_back(es.eigenvalues()(a));
  } else {
    CMatrix sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = m(idx[a], idx[b]);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sub, Eigen::EigenvaluesOnly);
    for (Eigen::Index a = 0; a < k; ++a) out.push_back(es.eigenvalues()(a));
  }
}

}  // namespace

std::vector<double> hermitian_eigvals(const HermitianMatrix& a) {
  const CMatrix& m = a.matrix();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (const auto& block : pattern_blocks(m)) append_block_eigvals(m, block, out);
  std::sort(out.begin(), out.end());
  return out;
}

EigenDecomposition hermitian_eigen(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix());
  return {es.eigenvalues(), es.eigenvectors()};
}

double log_sum_exp(const std::vector<double>& x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  const double mx = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

TraceExp trace_exp_from_eigvals(const std::vector<double>& eigvals, double scale) {
  std::vector<double> scaled(eigvals.size());
  std::transform(eigvals.begin(), eigvals.end(), scaled.begin(),
                 [scale](double l) { return scale * l; });
  const double lv = log_sum_exp(scaled);
  return {std::exp(lv), lv};
}

TraceExp trace_exp(const HermitianMatrix& a, double scale) {
  return trace_exp_from_eigvals(hermitian_eigvals(a), scale);
}

namespace {

using Combo = std::uint64_t;  // subset of mask indices

// Null-space basis of the GF(2) map combo -> XOR of selected masks.
std::vector<Combo> nullspace_basis(const std::vector<Mask>& masks) {
  struct Pivot {
    Mask reduced;
    Combo combo;
  };
  std::vector<Pivot> pivots;
  std::vector<Combo> basis;
  for (std::size_t j = 0; j < masks.size(); ++j) {
    Mask m = masks[j];
    Combo c = Combo{1} << j;
    for (const auto& p : pivots) {
      const Mask lead = Mask{1} << (31 - __builtin_clz(p.reduced));
      if (m & lead) {
        m ^= p.reduced;
        c ^= p.combo;
      }
    }
    if (m == 0) {
      basis.push_back(c);
    } else {
      // keep pivots reduced against the new leading bit
      const Mask lead = Mask{1} << (31 - __builtin_clz(m));
      for (auto& p : pivots)
        if (p.reduced & lead) {
          p.reduced ^= m;
          p.combo ^= c;
        }
      pivots.push_back({m, c});
      std::sort(pivots.begin(), pivots.end(),
                [](const Pivot& a, const Pivot& b) { return a.reduced > b.reduced; });
    }
  }
  return basis;
}

void subset_search(const std::vector<Mask>& masks, int max_size, std::size_t start, Mask acc,
                   Combo chosen, int size, std::vector<Combo>& out) {
  for (std::size_t j = start; j < masks.size(); ++j) {
    const Mask next = acc ^ masks[j];
    const Combo c = chosen | (Combo{1} << j);
    if (next == 0 && size + 1 >= 2) out.push_back(c);
    if (size + 1 < max_size) subset_search(masks, max_size, j + 1, next, c, size + 1, out);
  }
}

double subset_count(std::size_t m, int max_size) {
  double total = 0.0, term = 1.0;
  for (int s = 1; s <= max_size && s <= static_cast<int>(m); ++s) {
    term = term * static_cast<double>(m - s + 1) / s;
    total += term;
  }
  return total;
}

}  // namespace

std::vector<std::vector<int>> gf2_circuits(const std::vector<Mask>& masks, int max_size) {
  if (max_size < 2) throw ValidationError("gf2_circuits: max_size must be at least 2");
  if (masks.size() > 64) throw GuardError("mask_count", "gf2_circuits supports at most 64 masks");
  for (Mask m : masks)
    if (m == 0) throw ValidationError("gf2_circuits: masks must be nonzero");

  std::vector<Combo> dependent;
  const auto basis = nullspace_basis(masks);
  const double by_nullspace = std::ldexp(1.0, static_cast<int>(basis.size()));
  const double by_subsets = subset_count(masks.size(), max_size);
  if (by_nullspace <= by_subsets || by_nullspace <= 1 << 16) {
    if (basis.size() > 30) throw GuardError("nullity", "gf2_circuits: null space too large");
    // Gray-code walk over all nonzero null-space vectors.
    Combo v = 0;
    const std::uint64_t count = std::uint64_t{1} << basis.size();
    for (std::uint64_t g = 1; g < count; ++g) {
      v ^= basis[__builtin_ctzll(g)];
      if (__builtin_popcountll(v) <= max_size) dependent.push_back(v);
    }
  } else {
    subset_search(masks, max_size, 0, 0, 0, 0, dependent);
  }

  std::sort(dependent.begin(), dependent.end(), [](Combo a, Combo b) {
    const int pa = __builtin_popcountll(a), pb = __builtin_popcountll(b);
    return pa != pb ? pa < pb : a < b;
  });
  std::vector<Combo> circuits;
  for (Combo v : dependent) {
    const bool contains_circuit =
        std::any_of(circuits.begin(), circuits.end(), [v](Combo c) { return (c & ~v) == 0; });
    if (!contains_circuit) circuits.push_back(v);
  }

  std::vector<std::vector<int>> out;
  for (Combo c : circuits) {
    std::vector<int> idx;
    for (int j = 0; j < 64; ++j)
      if (c >> j & 1) idx.push_back(j);
    out.push_back(std::move(idx));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  for (int j = 0; j < static_cast<int>(masks.size()); ++j) out.push_back({j, j});
  return out;
}

double bessel_i1(double x) {
  if (!std::isfinite(x)) throw ValidationError("bessel_i1: argument must be finite");
  if (x < 0.0) throw ValidationError("bessel_i1: argument must be non-negative");
  if (x == 0.0) return 0.0;
  return std::cyl_bessel_i(1.0, x);
}

}  // namespace vgp
