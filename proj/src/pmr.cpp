#include "vgp/pmr.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "vgp/errors.hpp"

namespace vgp {

void ZPolynomial::add(Mask z_mask, cplx coeff) {
  auto it = std::lower_bound(terms.begin(), terms.end(), z_mask,
                             [](const auto& t, Mask m) { return t.first < m; });
  if (it != terms.end() && it->first == z_mask) {
    it->second += coeff;
    if (it->second == cplx(0.0, 0.0)) terms.erase(it);
  } else if (coeff != cplx(0.0, 0.0)) {
    terms.insert(it, {z_mask, coeff});
  }
}

Mask ZPolynomial::support() const {
  Mask s = 0;
  for (const auto& t : terms) s |= t.first;
  return s;
}

cplx eval_diagonal(const ZPolynomial& d, State z) {
  cplx v = 0.0;
  for (const auto& [mask, c] : d.terms) v += parity(mask & z) ? -c : c;
  return v;
}

std::vector<Mask> PMRForm::x_masks() const {
  std::vector<Mask> out;
  for (const auto& t : offdiag) out.push_back(t.x_mask);
  return out;
}

PMRForm pmr_decompose(const PauliSum& h) {
  static const cplx minus_i_pow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
  PMRForm p;
  p.n_spins = h.n_spins();
  for (const auto& t : h.terms()) {
    const cplx c = t.coeff * minus_i_pow[t.ops.y_count() % 4];
    if (t.ops.x == 0) {
      p.d0.add(t.ops.z, c);
      continue;
    }
    auto it = std::lower_bound(p.offdiag.begin(), p.offdiag.end(), t.ops.x,
                               [](const OffDiagonalTerm& o, Mask m) { return o.x_mask < m; });
    if (it == p.offdiag.end() || it->x_mask != t.ops.x)
      it = p.offdiag.insert(it, OffDiagonalTerm{t.ops.x, {}});
    it->d.add(t.ops.z, c);
  }
  std::erase_if(p.offdiag, [](const OffDiagonalTerm& o) { return o.d.terms.empty(); });
  return p;
}

HermitianMatrix pmr_to_dense(const PMRForm& p, int cap) {
  if (p.n_spins > cap)
    throw GuardError("dense_cap",
                     fmt::format("{} spins exceed the dense cap of {}", p.n_spins, cap));
  const Eigen::Index dim = Eigen::Index{1} << p.n_spins;
  CMatrix m = CMatrix::Zero(dim, dim);
  for (State z = 0; z < static_cast<State>(dim); ++z) {
    m(z, z) += eval_diagonal(p.d0, z);
    for (const auto& t : p.offdiag) {
      const State to = z ^ t.x_mask;
      m(to, z) += eval_diagonal(t.d, to);
    }
  }
  return HermitianMatrix(m, 1e-12);
}

Edge edge_weight(const PMRForm& p, int j, State z) {
  if (j < 0 || j >= static_cast<int>(p.offdiag.size()))
    throw ValidationError(fmt::format("permutation index {} out of range", j));
  const auto& t = p.offdiag[static_cast<std::size_t>(j)];
  const State to = z ^ t.x_mask;
  return {to, eval_diagonal(t.d, to)};
}

namespace {
nlohmann::json poly_json(const ZPolynomial& d) {
  auto arr = nlohmann::json::array();
  for (const auto& [mask, c] : d.terms) arr.push_back({mask, c.real(), c.imag()});
  return arr;
}
}  // namespace

nlohmann::json to_json(const PMRForm& p) {
  nlohmann::json j;
  j["n"] = p.n_spins;
  j["d0"] = poly_json(p.d0);
  j["off"] = nlohmann::json::array();
  for (const auto& t : p.offdiag) j["off"].push_back({{"p_mask", t.x_mask}, {"d", poly_json(t.d)}});
  return j;
}

}  // namespace vgp
