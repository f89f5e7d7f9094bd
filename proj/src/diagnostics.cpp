#include "vgp/diagnostics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "vgp/errors.hpp"
#include "vgp/pmr.hpp"

namespace vgp {

double f_stoq(const HermitianMatrix& h) {
  const CMatrix& m = h.matrix();
  double s = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j) s += std::norm(std::abs(m(i, j)) + m(i, j));
  return std::sqrt(s);
}

namespace {
double cycle_defect(const FundamentalCycle& c) {
  return std::abs(c.weight) * (1.0 - std::cos(c.phase));
}
}  // namespace

bool cycle_is_vgp(const FundamentalCycle& c, double tol) {
  return c.q() < 3 || cycle_defect(c) <= tol;
}

double f_vgp(const std::vector<FundamentalCycle>& cycles) {
  double s = 0.0;
  for (const auto& c : cycles)
    if (c.q() >= 3) s += cycle_defect(c);
  return s;
}

HermitianMatrix offdiag(const HermitianMatrix& h) {
  CMatrix m = h.matrix();
  m.diagonal().setZero();
  return HermitianMatrix(m);
}

HermitianMatrix abs_offdiag(const HermitianMatrix& h) {
  CMatrix m = h.matrix().cwiseAbs().cast<cplx>();
  m.diagonal().setZero();
  return HermitianMatrix(m);
}

HermitianMatrix m_map(const HermitianMatrix& h) {
  CMatrix m = h.matrix().cwiseAbs().cast<cplx>();
  m.diagonal() = -h.matrix().diagonal().real().cast<cplx>();
  return HermitianMatrix(m);
}

FEta f_eta(const HermitianMatrix& h, double eta) {
  if (!(eta >= 0.0)) throw ValidationError("eta must be non-negative");
  const TraceExp a = trace_exp(abs_offdiag(h), eta);
  const TraceExp b = trace_exp(offdiag(h), -eta);
  const double rel = -std::expm1(b.log_value - a.log_value);
  return {a.value * rel, rel};
}

double calF(const HermitianMatrix& h, const CMatrix& u) {
  if (u.rows() != h.dim() || u.cols() != h.dim())
    throw ValidationError("calF: unitary has the wrong dimension");
  const double defect =
      (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
  if (defect > 1e-10)
    throw ValidationError(fmt::format("calF: matrix is not unitary (defect {:.3e})", defect));
  return trace_exp(m_map(HermitianMatrix(u * h.matrix() * u.adjoint(), 1e-8)), 1.0).value;
}

double calF_identity(const HermitianMatrix& h) { return trace_exp(m_map(h), 1.0).value; }

double exact_avg_sign(const HermitianMatrix& h, double beta) {
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  const TraceExp num = trace_exp(h, -beta);
  const TraceExp den = trace_exp(m_map(h), beta);
  return std::exp(num.log_value - den.log_value);
}

double exact_avg_order(const HermitianMatrix& h, double beta) {
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  const auto eig = hermitian_eigen(m_map(h));
  const double top = eig.values.maxCoeff();
  const Eigen::VectorXd w = (beta * (eig.values.array() - top)).exp();
  const CMatrix b = abs_offdiag(h).matrix();
  // diagonal of V^dagger B V gives <v_k|B|v_k>
  const Eigen::VectorXd expect = (eig.vectors.adjoint() * b * eig.vectors).diagonal().real();
  return beta * expect.dot(w) / w.sum();
}

std::vector<FundamentalCycle> all_cycles(const PMRForm& p, int Q, std::size_t cycle_cap) {
  std::vector<FundamentalCycle> out;
  for (const auto& g : all_components(p)) {
    auto part = enumerate_cycles(g, Q, cycle_cap - std::min(cycle_cap, out.size()));
    out.insert(out.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return out;
}

DiagnosticReport diagnose(const PauliSum& h, const DiagnoseOptions& opts) {
  DiagnosticReport r;
  const auto dense = to_dense(h, opts.dense_cap);
  const auto pmr = pmr_decompose(h);
  r.eta = opts.eta;
  r.beta = opts.beta;
  r.Q = opts.Q > 0 ? opts.Q : default_cycle_bound(h.n_spins());
  r.f_stoq = f_stoq(dense);
  const auto fe = f_eta(dense, opts.eta);
  r.f_eta = fe.value;
  r.f_eta_relative = fe.relative;
  r.calF = calF_identity(dense);
  r.exact_avg_sign = exact_avg_sign(dense, opts.beta);

  const auto cycles = all_cycles(pmr, r.Q, opts.cycle_cap);
  r.cycle_count = cycles.size();
  r.f_vgp = f_vgp(cycles);
  double worst = 0.0;
  for (const auto& c : cycles) {
    if (cycle_is_vgp(c, opts.tol)) continue;
    ++r.violating_cycles;
    if (cycle_defect(c) > worst) {
      worst = cycle_defect(c);
      r.witness = c;
    }
  }
  r.vgp = fe.relative <= opts.tol;
  return r;
}

nlohmann::json to_json(const FundamentalCycle& c) {
  return {{"start", c.start},
          {"q", c.q()},
          {"indices", c.indices},
          {"weight", {c.weight.real(), c.weight.imag()}},
          {"phase", c.phase}};
}

nlohmann::json to_json(const DiagnosticReport& r) {
  nlohmann::json j = {{"f_stoq", r.f_stoq},
                      {"f_vgp", r.f_vgp},
                      {"f_eta", r.f_eta},
                      {"f_eta_relative", r.f_eta_relative},
                      {"eta", r.eta},
                      {"beta", r.beta},
                      {"calF", r.calF},
                      {"avg_sign", r.exact_avg_sign},
                      {"Q", r.Q},
                      {"cycle_count", r.cycle_count},
                      {"violating_cycles", r.violating_cycles},
                      {"vgp", r.vgp}};
  j["witness"] = r.witness ? to_json(*r.witness) : nlohmann::json(nullptr);
  return j;
}

}  // namespace vgp
