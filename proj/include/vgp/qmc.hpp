#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vgp/models.hpp"
#include "vgp/pmr.hpp"
#include "vgp/report_io.hpp"

namespace vgp {

struct MoveWeights {
  double flip = 0.25;   // flip one spin of the basis state
  double pair = 0.25;   // insert or delete an adjacent (j, j)
  double swap = 0.25;   // exchange two neighboring indices
  double block = 0.25;  // insert or delete a whole fundamental generator
};

struct QmcConfig {
  double beta = 1.0;
  std::int64_t sweeps = 10000;
  std::int64_t thermalization = 1000;
  std::uint64_t seed = 0;
  int q_max = 200;
  MoveWeights moves;
  int moves_per_sweep = 0;  // 0 selects max(8, 2N)
  State initial_state = 0;
  int generator_max_len = 0;  // 0 selects 2N
  std::int64_t stall_window = 200000;
};

struct MoveCounter {
  std::int64_t attempted = 0;
  std::int64_t accepted = 0;
  double rate() const { return attempted ? static_cast<double>(accepted) / attempted : 0.0; }
};

struct QmcStats {
  double avg_sign = 0.0;
  double sign_err = 0.0;
  double avg_q = 0.0;
  double q_err = 0.0;
  std::int64_t samples = 0;
  MoveCounter flip, insert, remove, swap;
  double min_sign = 1.0;                  // smallest Re(W)/|W| of any visited configuration
  std::int64_t nonpositive_weights = 0;  // visited configurations with W not real positive
  std::vector<double> block_sign;  // per-block means, used to merge chains
  std::vector<double> block_q;
};

/// Off-diagonal weight times exp(-beta[E_{z_0}, ..., E_{z_q}]) for the closed walk that
/// applies indices[0] first. Rejects walks that do not return to z.
cplx config_weight(const PMRForm& p, State z, const std::vector<int>& indices, double beta);

struct TruncatedPartition {
  double sum_w = 0.0;      // sum of Re W over closed sequences of length <= q_max
  double sum_abs_w = 0.0;  // sum of |W|
};
/// Exact sums by dynamic programming over (start, current state, multiset of visited
/// energy levels). `budget` bounds the number of table entries processed.
TruncatedPartition exact_partition_truncated(const PMRForm& p, double beta, int q_max,
                                             std::size_t budget = 50'000'000);

/// Metropolis sampling of |W| with the sign estimated as the mean of Re(W)/|W|.
/// Error bars use 32 blocks. Throws GuardError("qmc_stall") if no move is accepted for
/// `stall_window` consecutive attempts.
QmcStats run_qmc(const PMRForm& p, const QmcConfig& cfg);

/// Independent chains seeded from (cfg.seed, chain index), run on separate threads and
/// merged by pooling their blocks.
QmcStats run_qmc_chains(const PMRForm& p, const QmcConfig& cfg, int chains);

struct ScanRow {
  std::string model;
  int n_spins = 0;
  double beta = 0.0;
  int defects = 0;
  QmcStats stats;
  double exact_avg_sign = -1.0;  // negative when beyond the dense cap
  bool has_cycle_counts = false;
  std::size_t n_vgp = 0;
  std::size_t n_nonvgp = 0;
  double cycle_estimate = 0.0;  // (n_vgp - n_nonvgp) / (n_vgp + n_nonvgp)
};

struct ScanSpec {
  ModelSpec base;  // n_spins and defects are overwritten per row
  std::vector<int> sizes;
  std::vector<double> betas;
  std::vector<int> defects;  // empty: use base.defects
  bool cycle_counts = false;
  int Q = 0;                 // cycle bound for the counts, 0 selects the default
  int chains = 1;
};

std::vector<ScanRow> scan(const ScanSpec& spec, const QmcConfig& cfg);

/// Header: model,N,beta,Nd,avg_sign,stderr,avg_q,avg_q_err,exact_avg_sign,acc_insert,
/// acc_swap,acc_flip and, when requested, n_vgp,n_nonvgp,cycle_estimate.
Table scan_table(const std::vector<ScanRow>& rows);
std::string scan_csv(const std::vector<ScanRow>& rows);

}  // namespace vgp
