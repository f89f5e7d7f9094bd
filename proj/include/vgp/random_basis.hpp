#pragma once

#include <string>
#include <vector>

#include "vgp/numerics.hpp"
#include "vgp/pauli.hpp"
#include "vgp/report_io.hpp"
#include "vgp/rng.hpp"

namespace vgp {

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of diag(R) removed.
CMatrix haar_unitary(int dim, Rng& rng);

struct RandomBasisReport {
  int n_spins = 0;
  int dim = 0;
  double sigma2 = 0.0;
  double mu = 0.0;
  double lambda_star = 0.0;
  double formula_value = 0.0;
  double empirical_mean = 0.0;
  double empirical_stderr = 0.0;
  double rel_error = 0.0;
  int samples = 0;
};

/// Closed-form large-dimension estimate of E_U[tr exp(M(U H U^dagger))]:
/// e^{lambda*} + (D-1) I_1(2 sigma sqrt D) / (sigma sqrt D). Only the formula fields are set.
RandomBasisReport expected_calF_formula(const HermitianMatrix& h);

struct MeanErr {
  double mean = 0.0;
  double error = 0.0;
};
/// Sample mean and standard error of calF(H, U) over Haar-random U.
MeanErr empirical_expected_calF(const HermitianMatrix& h, int samples, Rng& rng);

/// Formula plus empirical mean; rel_error = |formula - empirical| / empirical.
RandomBasisReport compare_calF(const HermitianMatrix& h, int samples, Rng& rng);

struct ConcentrationReport {
  int samples = 0;
  double mean = 0.0;
  double p50 = 0.0;  // quantiles of |F(U) - mean| / mean
  double p90 = 0.0;
};
ConcentrationReport concentration_probe(const HermitianMatrix& h, int samples, Rng& rng);

/// Pauli term drawn for the random-Pauli experiment.
struct SignedPauli {
  PauliString ops;
  double coeff = 0.0;
};

/// calF(H, 1) for H = sum_j c_j P_j whose X-supports are distinct and nonzero, via the
/// eigenvalues sum_j |c_j| (-1)^{z . s_j} of |H_off|. Throws on a shared or empty X-support.
double calF_distinct_supports(int n_spins, const std::vector<SignedPauli>& terms);

/// Draws M uniformly random non-identity Pauli strings, keeping only tuples whose
/// X-supports are nonzero and pairwise distinct (no duplicates).
std::vector<SignedPauli> draw_distinct_support_paulis(int n_spins, const std::vector<double>& coeffs,
                                                      Rng& rng, int max_attempts = 100000);

struct RandomPauliReport {
  int n_spins = 0;
  int terms = 0;
  int trials = 0;
  double empirical_mean = 0.0;
  double empirical_stderr = 0.0;
  double formula_value = 0.0;  // e^{c_tot} + (D-1) prod cosh|c_j|
  double rel_error = 0.0;
};
RandomPauliReport random_pauli_experiment(int n_spins, const std::vector<double>& coeffs,
                                          int trials, Rng& rng);
double random_pauli_formula(int n_spins, const std::vector<double>& coeffs);

/// CSV header N,dim,samples,formula,empirical,stderr,rel_error.
Table random_basis_table(const std::vector<RandomBasisReport>& rows);

}  // namespace vgp
