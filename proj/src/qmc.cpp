#include "vgp/qmc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <thread>

#include <fmt/format.h>

#include "vgp/diagnostics.hpp"
#include "vgp/divided_differences.hpp"
#include "vgp/errors.hpp"
#include "vgp/report_io.hpp"
#include "vgp/rng.hpp"
#include "vgp/state_graph.hpp"

namespace vgp {

namespace {

constexpr int kBlocks = 32;

Mask closing_mask(const PMRForm& p, const std::vector<int>& indices) {
  Mask m = 0;
  for (int j : indices) {
    if (j < 0 || j >= static_cast<int>(p.offdiag.size()))
      throw ValidationError(fmt::format("permutation index {} out of range", j));
    m ^= p.offdiag[static_cast<std::size_t>(j)].x_mask;
  }
  return m;
}

}  // namespace

cplx config_weight(const PMRForm& p, State z, const std::vector<int>& indices, double beta) {
  if (closing_mask(p, indices) != 0)
    throw ValidationError("config_weight: index sequence does not return to the start state");
  std::vector<double> nodes{eval_diagonal(p.d0, z).real()};
  cplx d = 1.0;
  for (int j : indices) {
    const Edge e = edge_weight(p, j, z);
    d *= e.weight;
    z = e.to;
    nodes.push_back(eval_diagonal(p.d0, z).real());
  }
  return d * divided_differences(beta, nodes);
}

TruncatedPartition exact_partition_truncated(const PMRForm& p, double beta, int q_max,
                                             std::size_t budget) {
  if (q_max < 0) throw ValidationError("q_max must be non-negative");
  if (p.n_spins > 20) throw GuardError("basis_size", "exact expansion limited to 20 spins");
  const State dim = State{1} << p.n_spins;
  std::vector<double> energy(dim);
  for (State z = 0; z < dim; ++z) energy[z] = eval_diagonal(p.d0, z).real();
  // distinct energy levels, merged within a relative 1e-12
  std::vector<double> levels = energy;
  std::sort(levels.begin(), levels.end());
  double scale = 1.0;
  for (double e : levels) scale = std::max(scale, std::abs(e));
  std::vector<double> uniq;
  for (double e : levels)
    if (uniq.empty() || e - uniq.back() > 1e-12 * scale) uniq.push_back(e);
  std::vector<std::uint16_t> level_of(dim);
  for (State z = 0; z < dim; ++z)
    level_of[z] = static_cast<std::uint16_t>(
        std::lower_bound(uniq.begin(), uniq.end(), energy[z] - 1e-12 * scale) - uniq.begin());

  struct Acc {
    cplx d = 0.0;
    double abs_d = 0.0;
  };
  using Key = std::pair<State, std::vector<std::uint16_t>>;  // current state, sorted levels
  TruncatedPartition out;
  std::size_t work = 0;
  std::map<std::vector<std::uint16_t>, double> dd_cache;
  auto dd = [&](const std::vector<std::uint16_t>& lv) {
    auto it = dd_cache.find(lv);
    if (it != dd_cache.end()) return it->second;
    std::vector<double> nodes;
    for (auto l : lv) nodes.push_back(uniq[l]);
    const double v = divided_differences(beta, nodes);
    dd_cache.emplace(lv, v);
    return v;
  };

  for (State start = 0; start < dim; ++start) {
    std::map<Key, Acc> layer;
    layer[{start, {level_of[start]}}] = {1.0, 1.0};
    out.sum_w += std::exp(-beta * energy[start]);
    out.sum_abs_w += std::exp(-beta * energy[start]);
    for (int q = 1; q <= q_max; ++q) {
      std::map<Key, Acc> next;
      for (const auto& [key, acc] : layer)
        for (int j = 0; j < static_cast<int>(p.offdiag.size()); ++j) {
          if (++work > budget)
            throw GuardError("expansion_budget",
                             fmt::format("truncated expansion exceeds {} steps", budget));
          const Edge e = edge_weight(p, j, key.first);
          if (e.weight == cplx(0.0, 0.0)) continue;
          auto lv = key.second;
          lv.insert(std::upper_bound(lv.begin(), lv.end(), level_of[e.to]), level_of[e.to]);
          Acc& a = next[{e.to, std::move(lv)}];
          a.d += acc.d * e.weight;
          a.abs_d += acc.abs_d * std::abs(e.weight);
        }
      for (const auto& [key, acc] : next)
        if (key.first == start) {
          const double f = dd(key.second);
          out.sum_w += f * acc.d.real();
          out.sum_abs_w += std::abs(f) * acc.abs_d;
        }
      layer = std::move(next);
    }
  }
  return out;
}

namespace {

class Sampler {
 public:
  Sampler(const PMRForm& p, const QmcConfig& cfg)
      : p_(p), cfg_(cfg), rng_(cfg.seed), z_(cfg.initial_state) {
    if (!(cfg.beta > 0.0)) throw ValidationError("qmc: beta must be positive");
    if (cfg.q_max < 2) throw ValidationError("qmc: q_max must be at least 2");
    if (cfg.sweeps < kBlocks) throw ValidationError(fmt::format("qmc: need at least {} sweeps", kBlocks));
    if (p.n_spins > 24) throw GuardError("basis_size", "qmc limited to 24 spins");
    if (p.n_spins < 32 && cfg.initial_state >> p.n_spins)
      throw ValidationError("qmc: initial state outside the basis");
    const MoveWeights& w = cfg.moves;
    if (w.flip < 0 || w.pair < 0 || w.swap < 0 || w.block < 0)
      throw ValidationError("qmc: move weights must be non-negative");
    const State dim = State{1} << p.n_spins;
    energy_.resize(dim);
    for (State z = 0; z < dim; ++z) energy_[z] = eval_diagonal(p.d0, z).real();
    const int max_len = cfg.generator_max_len > 0 ? cfg.generator_max_len : 2 * p.n_spins;
    if (!p.offdiag.empty() && max_len >= 3)
      for (auto& g : fundamental_generators(p, max_len))
        if (g.size() >= 3 && static_cast<int>(g.size()) <= cfg.q_max) generators_.push_back(g);
    double block = generators_.empty() ? 0.0 : w.block;
    double pair = p.offdiag.empty() ? 0.0 : w.pair;
    double swap = p.offdiag.empty() ? 0.0 : w.swap;
    const double total = w.flip + pair + swap + block;
    if (!(total > 0.0)) throw ValidationError("qmc: no move has positive weight");
    cum_ = {w.flip / total, (w.flip + pair) / total, (w.flip + pair + swap) / total};
    moves_per_sweep_ = cfg.moves_per_sweep > 0 ? cfg.moves_per_sweep : std::max(8, 2 * p.n_spins);
    current_ = evaluate(z_, seq_);
  }

  QmcStats run() {
    for (std::int64_t s = 0; s < cfg_.thermalization; ++s) sweep();
    std::vector<double> signs, qs;
    signs.reserve(static_cast<std::size_t>(cfg_.sweeps));
    qs.reserve(static_cast<std::size_t>(cfg_.sweeps));
    stats_ = QmcStats{};
    stats_.min_sign = current_.unit.real();
    for (std::int64_t s = 0; s < cfg_.sweeps; ++s) {
      sweep();
      signs.push_back(current_.unit.real());
      qs.push_back(static_cast<double>(seq_.size()));
    }
    stats_.samples = cfg_.sweeps;
    stats_.block_sign = block_means(signs);
    stats_.block_q = block_means(qs);
    finish(stats_);
    return stats_;
  }

  static std::vector<double> block_means(const std::vector<double>& x) {
    std::vector<double> out(kBlocks, 0.0);
    const std::size_t per = x.size() / kBlocks;
    for (int b = 0; b < kBlocks; ++b) {
      double s = 0.0;
      for (std::size_t i = b * per; i < (b + 1) * per; ++i) s += x[i];
      out[b] = s / static_cast<double>(per);
    }
    return out;
  }

  static void finish(QmcStats& st) {
    auto mean_err = [](const std::vector<double>& b, double& mean, double& err) {
      const double n = static_cast<double>(b.size());
      mean = 0.0;
      for (double v : b) mean += v;
      mean /= n;
      double var = 0.0;
      for (double v : b) var += (v - mean) * (v - mean);
      err = std::sqrt(var / (n - 1.0) / n);
    };
    mean_err(st.block_sign, st.avg_sign, st.sign_err);
    mean_err(st.block_q, st.avg_q, st.q_err);
  }

 private:
  struct Weight {
    double log_abs = -INFINITY;  // -inf marks a zero weight
    cplx unit = 1.0;             // W / |W|
  };

  Weight evaluate(State z, const std::vector<int>& seq) const {
    Weight w;
    std::vector<double> nodes{energy_[z]};
    cplx d = 1.0;
    double log_d = 0.0;
    for (int j : seq) {
      const Edge e = edge_weight(p_, j, z);
      if (e.weight == cplx(0.0, 0.0)) return w;
      const double a = std::abs(e.weight);
      log_d += std::log(a);
      d *= e.weight / a;
      z = e.to;
      nodes.push_back(energy_[z]);
    }
    const auto dd = log_divided_differences(cfg_.beta, nodes);
    if (!std::isfinite(dd.log_abs)) return w;
    w.log_abs = log_d + dd.log_abs;
    w.unit = d / std::abs(d) * static_cast<double>(dd.sign);
    return w;
  }

  bool metropolis(const Weight& proposed, double log_factor) {
    if (!std::isfinite(proposed.log_abs)) return false;
    const double log_ratio = proposed.log_abs - current_.log_abs + log_factor;
    return log_ratio >= 0.0 || std::log(rng_.uniform()) < log_ratio;
  }

  void record(MoveCounter& c, bool accepted) {
    ++c.attempted;
    if (accepted) {
      ++c.accepted;
      stalled_ = 0;
      const double s = current_.unit.real();
      stats_.min_sign = std::min(stats_.min_sign, s);
      if (s < 1.0 - 1e-9) ++stats_.nonpositive_weights;
    } else if (++stalled_ > cfg_.stall_window) {
      throw GuardError("qmc_stall",
                       fmt::format("no move accepted in {} consecutive attempts", cfg_.stall_window));
    }
  }

  void sweep() {
    for (int m = 0; m < moves_per_sweep_; ++m) {
      const double u = rng_.uniform();
      if (u < cum_[0]) flip_move();
      else if (u < cum_[1]) pair_move();
      else if (u < cum_[2]) swap_move();
      else block_move();
    }
  }

  void flip_move() {
    const State z2 = z_ ^ (State{1} << rng_.below(static_cast<std::uint64_t>(p_.n_spins)));
    const Weight w = evaluate(z2, seq_);
    const bool ok = metropolis(w, 0.0);
    if (ok) {
      z_ = z2;
      current_ = w;
    }
    record(stats_.flip, ok);
  }

  void pair_move() {
    const auto q = seq_.size();
    const double m = static_cast<double>(p_.offdiag.size());
    if (rng_.uniform() < 0.5) {
      const int j = static_cast<int>(rng_.below(p_.offdiag.size()));
      const auto pos = rng_.below(q + 1);
      if (static_cast<int>(q) + 2 > cfg_.q_max) return record(stats_.insert, false);
      auto s2 = seq_;
      s2.insert(s2.begin() + static_cast<std::ptrdiff_t>(pos), 2, j);
      const Weight w = evaluate(z_, s2);
      const bool ok = metropolis(w, std::log(m));
      if (ok) accept(std::move(s2), w);
      record(stats_.insert, ok);
    } else {
      if (q < 2) return record(stats_.remove, false);
      const auto pos = rng_.below(q - 1);
      if (seq_[pos] != seq_[pos + 1]) return record(stats_.remove, false);
      auto s2 = seq_;
      s2.erase(s2.begin() + static_cast<std::ptrdiff_t>(pos),
               s2.begin() + static_cast<std::ptrdiff_t>(pos) + 2);
      const Weight w = evaluate(z_, s2);
      const bool ok = metropolis(w, -std::log(m));
      if (ok) accept(std::move(s2), w);
      record(stats_.remove, ok);
    }
  }

  void swap_move() {
    const auto q = seq_.size();
    if (q < 2) return record(stats_.swap, false);
    const auto pos = rng_.below(q - 1);
    if (seq_[pos] == seq_[pos + 1]) return record(stats_.swap, false);
    auto s2 = seq_;
    std::swap(s2[pos], s2[pos + 1]);
    const Weight w = evaluate(z_, s2);
    const bool ok = metropolis(w, 0.0);
    if (ok) accept(std::move(s2), w);
    record(stats_.swap, ok);
  }

  void block_move() {
    const auto& g = generators_[rng_.below(generators_.size())];
    const auto q = seq_.size();
    const auto len = g.size();
    const double log_fact = std::lgamma(static_cast<double>(len) + 1.0);
    if (rng_.uniform() < 0.5) {
      if (q + len > static_cast<std::size_t>(cfg_.q_max)) return record(stats_.insert, false);
      std::vector<int> block = g;
      for (std::size_t i = len - 1; i > 0; --i) std::swap(block[i], block[rng_.below(i + 1)]);
      const auto pos = rng_.below(q + 1);
      auto s2 = seq_;
      s2.insert(s2.begin() + static_cast<std::ptrdiff_t>(pos), block.begin(), block.end());
      const Weight w = evaluate(z_, s2);
      const bool ok = metropolis(w, log_fact);
      if (ok) accept(std::move(s2), w);
      record(stats_.insert, ok);
    } else {
      if (q < len) return record(stats_.remove, false);
      const auto pos = rng_.below(q - len + 1);
      std::vector<int> window(seq_.begin() + static_cast<std::ptrdiff_t>(pos),
                              seq_.begin() + static_cast<std::ptrdiff_t>(pos + len));
      std::sort(window.begin(), window.end());
      if (window != g) return record(stats_.remove, false);
      auto s2 = seq_;
      s2.erase(s2.begin() + static_cast<std::ptrdiff_t>(pos),
               s2.begin() + static_cast<std::ptrdiff_t>(pos + len));
      const Weight w = evaluate(z_, s2);
      const bool ok = metropolis(w, -log_fact);
      if (ok) accept(std::move(s2), w);
      record(stats_.remove, ok);
    }
  }

  void accept(std::vector<int>&& s2, const Weight& w) {
    seq_ = std::move(s2);
    current_ = w;
  }

  const PMRForm& p_;
  QmcConfig cfg_;
  Rng rng_;
  State z_;
  std::vector<int> seq_;
  std::vector<double> energy_;
  std::vector<std::vector<int>> generators_;
  std::array<double, 3> cum_{};
  int moves_per_sweep_ = 8;
  Weight current_;
  QmcStats stats_;
  std::int64_t stalled_ = 0;
};

void add_counter(MoveCounter& a, const MoveCounter& b) {
  a.attempted += b.attempted;
  a.accepted += b.accepted;
}

}  // namespace

QmcStats run_qmc(const PMRForm& p, const QmcConfig& cfg) {
  Sampler s(p, cfg);
  return s.run();
}

QmcStats run_qmc_chains(const PMRForm& p, const QmcConfig& cfg, int chains) {
  if (chains < 1) throw ValidationError("qmc: chains must be at least 1");
  if (chains == 1) return run_qmc(p, cfg);
  std::vector<QmcStats> parts(static_cast<std::size_t>(chains));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chains));
  std::vector<std::thread> threads;
  for (int c = 0; c < chains; ++c)
    threads.emplace_back([&, c] {
      try {
        QmcConfig local = cfg;
        local.seed = mix_seed(cfg.seed ^ mix_seed(static_cast<std::uint64_t>(c) + 1));
        parts[static_cast<std::size_t>(c)] = run_qmc(p, local);
      } catch (...) {
        errors[static_cast<std::size_t>(c)] = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  QmcStats merged;
  for (const auto& s : parts) {
    merged.samples += s.samples;
    add_counter(merged.flip, s.flip);
    add_counter(merged.insert, s.insert);
    add_counter(merged.remove, s.remove);
    add_counter(merged.swap, s.swap);
    merged.min_sign = std::min(merged.min_sign, s.min_sign);
    merged.nonpositive_weights += s.nonpositive_weights;
    merged.block_sign.insert(merged.block_sign.end(), s.block_sign.begin(), s.block_sign.end());
    merged.block_q.insert(merged.block_q.end(), s.block_q.begin(), s.block_q.end());
  }
  Sampler::finish(merged);
  return merged;
}

std::vector<ScanRow> scan(const ScanSpec& spec, const QmcConfig& cfg) {
  std::vector<ScanRow> rows;
  const std::vector<int> defects = spec.defects.empty() ? std::vector<int>{spec.base.defects}
                                                        : spec.defects;
  for (int nd : defects)
    for (int n : spec.sizes)
      for (double beta : spec.betas) {
        ModelSpec m = spec.base;
        m.n_spins = n;
        m.defects = nd;
        const PauliSum h = build_model(m);
        const PMRForm p = pmr_decompose(h);
        QmcConfig c = cfg;
        c.beta = beta;
        ScanRow row;
        row.model = m.name;
        row.n_spins = h.n_spins();
        row.beta = beta;
        row.defects = nd;
        row.stats = run_qmc_chains(p, c, spec.chains);
        if (h.n_spins() <= kDefaultDenseCap) row.exact_avg_sign = exact_avg_sign(to_dense(h), beta);
        if (spec.cycle_counts) {
          const int Q = spec.Q > 0 ? spec.Q : default_cycle_bound(h.n_spins());
          for (const auto& cyc : all_cycles(p, Q)) {
            if (cyc.q() < 3) continue;
            (cycle_is_vgp(cyc) ? row.n_vgp : row.n_nonvgp) += 1;
          }
          row.has_cycle_counts = true;
          const double total = static_cast<double>(row.n_vgp + row.n_nonvgp);
          row.cycle_estimate = total > 0 ? (static_cast<double>(row.n_vgp) -
                                            static_cast<double>(row.n_nonvgp)) / total
                                         : 1.0;
        }
        rows.push_back(std::move(row));
      }
  return rows;
}

Table scan_table(const std::vector<ScanRow>& rows) {
  Table t;
  t.header = {"model", "N", "beta", "Nd", "avg_sign", "stderr", "avg_q", "avg_q_err",
              "exact_avg_sign", "acc_insert", "acc_swap", "acc_flip"};
  const bool cycles = std::any_of(rows.begin(), rows.end(),
                                  [](const ScanRow& r) { return r.has_cycle_counts; });
  if (cycles) t.header.insert(t.header.end(), {"n_vgp", "n_nonvgp", "cycle_estimate"});
  for (const auto& r : rows) {
    std::vector<std::string> cells = {
        r.model, std::to_string(r.n_spins), format_number(r.beta), std::to_string(r.defects),
        format_number(r.stats.avg_sign), format_number(r.stats.sign_err),
        format_number(r.stats.avg_q), format_number(r.stats.q_err),
        r.exact_avg_sign >= 0 ? format_number(r.exact_avg_sign) : std::string("nan"),
        format_number(r.stats.insert.rate()), format_number(r.stats.swap.rate()),
        format_number(r.stats.flip.rate())};
    if (cycles) {
      cells.push_back(std::to_string(r.n_vgp));
      cells.push_back(std::to_string(r.n_nonvgp));
      cells.push_back(format_number(r.cycle_estimate));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

std::string scan_csv(const std::vector<ScanRow>& rows) { return scan_table(rows).to_csv(); }

}  // namespace vgp
