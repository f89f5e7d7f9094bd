#pragma once

#include <optional>

#include "json.hpp"
#include "vgp/numerics.hpp"
#include "vgp/pauli.hpp"
#include "vgp/state_graph.hpp"

namespace vgp {

inline constexpr double kDefaultVgpTol = 1e-9;

/// Frobenius distance || |H_off| + H_off ||_F; zero iff all off-diagonal entries are real and <= 0.
double f_stoq(const HermitianMatrix& h);

/// sum over cycles with q >= 3 of |W| (1 - cos theta), theta = arg((-1)^q W).
double f_vgp(const std::vector<FundamentalCycle>& cycles);

/// tr exp(eta |H_off|) - tr exp(-eta H_off). `relative` divides by the first trace, which
/// keeps the value comparable across system sizes.
struct FEta {
  double value = 0.0;
  double relative = 0.0;
};
FEta f_eta(const HermitianMatrix& h, double eta);

/// Entrywise |.| off the diagonal, negated diagonal.
HermitianMatrix m_map(const HermitianMatrix& h);
/// Entrywise |.| of the off-diagonal part, zero diagonal.
HermitianMatrix abs_offdiag(const HermitianMatrix& h);
HermitianMatrix offdiag(const HermitianMatrix& h);

/// tr exp(M(U H U^dagger)). U must be unitary within 1e-10.
double calF(const HermitianMatrix& h, const CMatrix& u);
double calF_identity(const HermitianMatrix& h);

/// tr exp(-beta H) / tr exp(beta M(H)).
double exact_avg_sign(const HermitianMatrix& h, double beta);

/// beta tr(|H_off| exp(beta M(H))) / tr exp(beta M(H)): mean expansion order under |W|.
double exact_avg_order(const HermitianMatrix& h, double beta);

struct DiagnoseOptions {
  double eta = 1.0;
  double beta = 1.0;  // for the average sign
  int Q = 0;          // 0 selects default_cycle_bound(N)
  double tol = kDefaultVgpTol;
  int dense_cap = kDefaultDenseCap;
  std::size_t cycle_cap = kDefaultCycleCap;
};

struct DiagnosticReport {
  double f_stoq = 0.0;
  double f_vgp = 0.0;
  double f_eta = 0.0;
  double f_eta_relative = 0.0;
  double eta = 1.0;
  double beta = 1.0;
  double calF = 0.0;
  double exact_avg_sign = 1.0;
  int Q = 0;
  std::size_t cycle_count = 0;
  std::size_t violating_cycles = 0;
  bool vgp = true;
  std::optional<FundamentalCycle> witness;
};

/// Full report; the verdict is f_eta_relative <= tol. The witness is the cycle with the
/// largest |W| (1 - cos theta) when any cycle violates the phase condition.
DiagnosticReport diagnose(const PauliSum& h, const DiagnoseOptions& opts = {});

/// Cycles over every component of the full basis.
std::vector<FundamentalCycle> all_cycles(const PMRForm& p, int Q,
                                         std::size_t cycle_cap = kDefaultCycleCap);

/// |W| (1 - cos theta) <= tol.
bool cycle_is_vgp(const FundamentalCycle& c, double tol = kDefaultVgpTol);

nlohmann::json to_json(const FundamentalCycle& c);
nlohmann::json to_json(const DiagnosticReport& r);

}  // namespace vgp
