#include "vgp/random_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "vgp/diagnostics.hpp"
#include "vgp/errors.hpp"

namespace vgp {

CMatrix haar_unitary(int dim, Rng& rng) {
  if (dim < 2) throw ValidationError("haar_unitary: dimension must be at least 2");
  CMatrix g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (int j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0);
  }
  return q;
}

RandomBasisReport expected_calF_formula(const HermitianMatrix& h) {
  const double fro = h.matrix().norm();
  if (!(fro > 0.0)) throw ValidationError("expected_calF_formula: zero Hamiltonian");
  RandomBasisReport r;
  const double d = static_cast<double>(h.dim());
  r.dim = static_cast<int>(h.dim());
  r.n_spins = static_cast<int>(std::lround(std::log2(d)));
  r.sigma2 = (2.0 - std::numbers::pi / 2.0) * fro * fro / (2.0 * d * d);
  r.mu = fro * std::sqrt(std::numbers::pi) / (2.0 * d);
  r.lambda_star = -r.mu + r.mu * d + r.sigma2 / r.mu;
  const double s = std::sqrt(r.sigma2 * d);
  r.formula_value = std::exp(r.lambda_star) + (d - 1.0) * bessel_i1(2.0 * s) / s;
  return r;
}

namespace {
std::vector<double> calF_samples(const HermitianMatrix& h, int samples, Rng& rng) {
  std::vector<double> out;
  for (int k = 0; k < samples; ++k)
    out.push_back(calF(h, haar_unitary(static_cast<int>(h.dim()), rng)));
  return out;
}

MeanErr mean_err(const std::vector<double>& x) {
  MeanErr m;
  const double n = static_cast<double>(x.size());
  for (double v : x) m.mean += v;
  m.mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - m.mean) * (v - m.mean);
  m.error = std::sqrt(var / (n - 1.0) / n);
  return m;
}

double quantile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const double pos = p * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, x.size() - 1);
  return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}
}  // namespace

MeanErr empirical_expected_calF(const HermitianMatrix& h, int samples, Rng& rng) {
  if (samples < 2) throw ValidationError("empirical_expected_calF: need at least 2 samples");
  return mean_err(calF_samples(h, samples, rng));
}

RandomBasisReport compare_calF(const HermitianMatrix& h, int samples, Rng& rng) {
  RandomBasisReport r = expected_calF_formula(h);
  const MeanErr m = empirical_expected_calF(h, samples, rng);
  r.samples = samples;
  r.empirical_mean = m.mean;
  r.empirical_stderr = m.error;
  r.rel_error = std::abs(r.formula_value - m.mean) / m.mean;
  return r;
}

ConcentrationReport concentration_probe(const HermitianMatrix& h, int samples, Rng& rng) {
  if (samples < 30) throw ValidationError("concentration_probe: need at least 30 samples");
  const auto x = calF_samples(h, samples, rng);
  ConcentrationReport r;
  r.samples = samples;
  r.mean = mean_err(x).mean;
  std::vector<double> dev;
  for (double v : x) dev.push_back(std::abs(v - r.mean) / r.mean);
  r.p50 = quantile(dev, 0.5);
  r.p90 = quantile(dev, 0.9);
  return r;
}

double calF_distinct_supports(int n_spins, const std::vector<SignedPauli>& terms) {
  if (n_spins < 1 || n_spins > 24) throw ValidationError("calF_distinct_supports: N out of range");
  for (std::size_t a = 0; a < terms.size(); ++a) {
    if (terms[a].ops.x == 0) throw ValidationError("calF_distinct_supports: diagonal term");
    for (std::size_t b = 0; b < a; ++b)
      if (terms[a].ops.x == terms[b].ops.x)
        throw ValidationError("calF_distinct_supports: repeated X-support");
  }
  // |H_off| = sum_j |c_j| X_{s_j}; its eigenvalues are the character sums below
  std::vector<double> lambdas;
  const State dim = State{1} << n_spins;
  for (State z = 0; z < dim; ++z) {
    double l = 0.0;
    for (const auto& t : terms) l += parity(z & t.ops.x) ? -std::abs(t.coeff) : std::abs(t.coeff);
    lambdas.push_back(l);
  }
  return trace_exp_from_eigvals(lambdas, 1.0).value;
}

std::vector<SignedPauli> draw_distinct_support_paulis(int n_spins, const std::vector<double>& coeffs,
                                                      Rng& rng, int max_attempts) {
  if (n_spins < 1 || n_spins > 24) throw ValidationError("random Pauli: N out of range");
  const std::uint64_t words = std::uint64_t{1} << (2 * n_spins);
  const Mask low = (Mask{1} << n_spins) - 1;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<SignedPauli> out;
    bool ok = true;
    for (double c : coeffs) {
      const std::uint64_t w = 1 + rng.below(words - 1);  // nonzero word: not the identity
      const PauliString ops{static_cast<Mask>(w) & low, static_cast<Mask>(w >> n_spins) & low};
      if (ops.x == 0) ok = false;
      for (const auto& t : out) ok = ok && t.ops.x != ops.x;
      if (!ok) break;
      out.push_back({ops, c});
    }
    if (ok) return out;
  }
  throw GuardError("rejection_budget",
                   fmt::format("no tuple with distinct X-supports after {} attempts", max_attempts));
}

double random_pauli_formula(int n_spins, const std::vector<double>& coeffs) {
  double ctot = 0.0, prod = 1.0;
  for (double c : coeffs) {
    ctot += std::abs(c);
    prod *= std::cosh(std::abs(c));
  }
  return std::exp(ctot) + (std::ldexp(1.0, n_spins) - 1.0) * prod;
}

RandomPauliReport random_pauli_experiment(int n_spins, const std::vector<double>& coeffs,
                                          int trials, Rng& rng) {
  if (trials < 1) throw ValidationError("random Pauli: trials must be positive");
  if (coeffs.empty()) throw ValidationError("random Pauli: need at least one coefficient");
  std::vector<double> values;
  for (int t = 0; t < trials; ++t)
    values.push_back(calF_distinct_supports(n_spins, draw_distinct_support_paulis(n_spins, coeffs, rng)));
  RandomPauliReport r;
  r.n_spins = n_spins;
  r.terms = static_cast<int>(coeffs.size());
  r.trials = trials;
  const MeanErr m = trials > 1 ? mean_err(values) : MeanErr{values[0], 0.0};
  r.empirical_mean = m.mean;
  r.empirical_stderr = m.error;
  r.formula_value = random_pauli_formula(n_spins, coeffs);
  r.rel_error = std::abs(r.formula_value - r.empirical_mean) / r.empirical_mean;
  return r;
}

Table random_basis_table(const std::vector<RandomBasisReport>& rows) {
  Table t;
  t.header = {"N", "dim", "samples", "formula", "empirical", "stderr", "rel_error"};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.n_spins), std::to_string(r.dim), std::to_string(r.samples),
                      format_number(r.formula_value), format_number(r.empirical_mean),
                      format_number(r.empirical_stderr), format_number(r.rel_error)});
  return t;
}

}  // namespace vgp
