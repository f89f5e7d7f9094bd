#include "vgp/vgp_check.hpp"

#include <algorithm>
#include <queue>
#include <tuple>
#include <cmath>
#include <numbers>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "vgp/errors.hpp"

namespace vgp {

std::string to_string(VgpMethod m) {
  switch (m) {
    case VgpMethod::dx_theorem: return "dx_theorem";
    case VgpMethod::two_local_triangle: return "two_local_triangle";
    case VgpMethod::parity_argument: return "parity_argument";
    case VgpMethod::gauge_consistency: return "gauge_consistency";
    case VgpMethod::spectral_fallback: return "spectral_fallback";
  }
  return "unknown";
}

namespace {

double wrap(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

// Gauge search on a small explicit graph. Vertices are basis states; `edges[a]` lists
// (b, <b|H|a>). Records every edge whose phase disagrees with the spanning-forest gauge.
struct LocalGraph {
  std::vector<State> states;
  std::vector<std::vector<std::pair<int, cplx>>> edges;
};

// Gauge phases are propagated along a maximum-weight spanning tree, so every closing
// edge is the lightest of the cycle it closes. Its violation |w| (1 - cos r) then has
// the same form as a cycle term of f_vgp, and negligible edges cannot veto a verdict.
void gauge_check(const LocalGraph& g, Mask sites, double tol, VgpVerdict& v,
                 std::size_t max_records = 16) {
  const int n = static_cast<int>(g.states.size());
  std::vector<double> phi(n, 0.0);
  std::vector<char> seen(n, 0);
  using Item = std::tuple<double, int, int>;  // (|w|, from, position in from's edge list)
  std::priority_queue<Item> heap;
  auto push_edges = [&](int a) {
    for (int k = 0; k < static_cast<int>(g.edges[a].size()); ++k)
      if (!seen[g.edges[a][k].first]) heap.emplace(std::abs(g.edges[a][k].second), a, k);
  };
  for (int root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    push_edges(root);
    while (!heap.empty()) {
      const auto [mag, a, k] = heap.top();
      heap.pop();
      const auto& [b, w] = g.edges[a][k];
      if (seen[b]) continue;
      seen[b] = 1;
      phi[b] = wrap(phi[a] + std::arg(-w));
      push_edges(b);
    }
  }
  for (int a = 0; a < n; ++a)
    for (const auto& [b, w] : g.edges[a]) {
      if (b < a) continue;  // the reverse edge carries the conjugate condition
      ++v.statements;
      const double r = wrap(std::arg(-w) - (phi[b] - phi[a]));
      const double score = std::abs(w) * (1.0 - std::cos(r));
      v.max_violation = std::max(v.max_violation, score);
      if (score > tol) {
        v.vgp = false;
        if (v.violations.size() < max_records)
          v.violations.push_back({"closed walk with nonzero geometric phase", sites, g.states[a],
                                  g.states[b], r});
      }
    }
}

std::vector<int> bits_of(Mask m) {
  std::vector<int> out;
  for (int l = 0; l < 32; ++l)
    if (m >> l & 1) out.push_back(l);
  return out;
}

}  // namespace

VgpVerdict check_dx_vgp(const PMRForm& p, int k, int depth) {
  if (depth < 2) throw ValidationError("check_dx_vgp: depth must be at least 2");
  VgpVerdict v;
  v.method = VgpMethod::dx_theorem;
  const auto masks = p.x_masks();
  const int m = static_cast<int>(masks.size());
  if (m == 0) return v;
  if (m > 64) throw GuardError("mask_count", "check_dx_vgp supports at most 64 terms");
  for (const auto& c : gf2_circuits(masks, m))
    if (c.size() > 2 || (c.size() == 2 && c[0] != c[1]))
      throw ValidationError(fmt::format(
          "check_dx_vgp: terms {} multiply to the identity; use spectral diagnostics instead",
          fmt::join(c, ",")));

  std::vector<Mask> dsupp(m), reach(m);
  for (int j = 0; j < m; ++j) {
    dsupp[j] = p.offdiag[j].d.support();
    if (popcount(dsupp[j]) > k)
      throw ValidationError(fmt::format("check_dx_vgp: term {} has a diagonal on {} spins, above k = {}",
                                        j, popcount(dsupp[j]), k));
    reach[j] = dsupp[j] | masks[j];
  }
  // terms touching each spin, for neighbor lookup
  std::vector<std::vector<int>> by_site(p.n_spins);
  for (int j = 0; j < m; ++j)
    for (int l : bits_of(reach[j])) by_site[l].push_back(j);
  auto interacts = [&](int a, int b) {
    return (masks[a] & dsupp[b]) != 0 || (masks[b] & dsupp[a]) != 0;
  };

  // connected interacting sets of size 2..depth, each once
  std::set<std::vector<int>> sets;
  std::vector<std::vector<int>> frontier;
  for (int j = 0; j < m; ++j) frontier.push_back({j});
  for (int size = 2; size <= depth; ++size) {
    std::set<std::vector<int>> grown;
    for (const auto& s : frontier)
      for (int a : s)
        for (int l : bits_of(reach[a]))
          for (int b : by_site[l]) {
            if (std::find(s.begin(), s.end(), b) != s.end() || !interacts(a, b)) continue;
            auto t = s;
            t.insert(std::lower_bound(t.begin(), t.end(), b), b);
            grown.insert(std::move(t));
          }
    frontier.assign(grown.begin(), grown.end());
    sets.insert(grown.begin(), grown.end());
  }

  for (const auto& s : sets) {
    Mask u = 0;
    for (int j : s) u |= reach[j];
    const auto ubits = bits_of(u);
    if (ubits.size() > 20) throw GuardError("locality", "check_dx_vgp: joint support above 20 spins");
    const int cube = 1 << s.size();
    std::vector<Mask> flips(cube, 0);
    for (int t = 1; t < cube; ++t) flips[t] = flips[t & (t - 1)] ^ masks[s[__builtin_ctz(t)]];
    for (std::uint32_t code = 0; code < (1u << ubits.size()); ++code) {
      State a = 0;
      for (std::size_t b = 0; b < ubits.size(); ++b)
        if (code >> b & 1) a |= State{1} << ubits[b];
      bool is_base = true;  // visit each cube once, from its smallest vertex
      for (int t = 1; t < cube && is_base; ++t) is_base = (a ^ flips[t]) > a;
      if (!is_base) continue;
      LocalGraph g;
      g.edges.resize(cube);
      for (int t = 0; t < cube; ++t) g.states.push_back(a ^ flips[t]);
      for (int t = 0; t < cube; ++t)
        for (std::size_t i = 0; i < s.size(); ++i) {
          const int t2 = t ^ (1 << i);
          const cplx w = eval_diagonal(p.offdiag[s[i]].d, g.states[t2]);
          if (w != cplx(0.0, 0.0)) g.edges[t].push_back({t2, w});
        }
      gauge_check(g, u, kDefaultVgpTol, v);
    }
  }
  return v;
}

VgpVerdict check_2local_triangle(const std::vector<TwoLocalBond>& edges) {
  if (edges.size() != 3) throw ValidationError("check_2local_triangle: expected three edges");
  std::vector<int> sites;
  for (const auto& e : edges) {
    if (e.i == e.j) throw ValidationError("check_2local_triangle: edge joins a spin to itself");
    sites.push_back(e.i);
    sites.push_back(e.j);
  }
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  if (sites.size() != 3) throw ValidationError("check_2local_triangle: edges do not form a triangle");
  auto local = [&](int s) {
    return static_cast<int>(std::find(sites.begin(), sites.end(), s) - sites.begin());
  };

  VgpVerdict v;
  v.method = VgpMethod::two_local_triangle;
  std::vector<TwoLocalBond> loc;
  bool all_split = true;
  for (const auto& e : edges) {
    const bool absent = e.h0 == 0.0 && e.h1 == 0.0 && e.h2 == 0.0 && e.h3 == 0.0;
    if (absent) {
      all_split = false;
      continue;
    }
    all_split = all_split && e.h1 != e.h2;
    loc.push_back({local(e.i), local(e.j), e.h0, e.h1, e.h2, e.h3});
  }
  if (all_split) {
    v.vgp = false;
    v.violations.push_back({"single-Z coefficients differ on every edge", 0b111, 0, 0,
                            std::numbers::pi});
  }

  const PMRForm p = pmr_decompose(two_local_model(3, loc));
  const auto walk_weight = [&](State z, const std::vector<int>& idx) {
    cplx w = 1.0;
    for (int j : idx) {
      const Edge e = edge_weight(p, j, z);
      w *= e.weight;
      z = e.to;
    }
    return w;
  };
  std::vector<std::vector<int>> walks;
  const int m = static_cast<int>(p.offdiag.size());
  if (m == 3) walks.push_back({0, 1, 2});
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) walks.push_back({a, b, a, b});
  for (State z = 0; z < 8; ++z)
    for (const auto& walk : walks) {
      const cplx w = walk_weight(z, walk);
      if (w == cplx(0.0, 0.0)) continue;
      ++v.statements;
      const double r = std::arg(walk.size() % 2 ? -w : w);
      const double score = std::abs(w) * (1.0 - std::cos(r));
      v.max_violation = std::max(v.max_violation, score);
      if (score > kDefaultVgpTol) {
        v.vgp = false;
        if (v.violations.size() < 16)
          v.violations.push_back({fmt::format("closed walk ({})", fmt::join(walk, ",")), 0b111, z,
                                  z, r});
      }
    }
  return v;
}

TildeHeisCheck check_tilde_heis(int n_spins, const std::vector<TildeHeisBond>& bonds,
                                int cross_check_cap, double tol) {
  TildeHeisCheck out;
  bool pos = false, neg = false, h0_ok = true;
  for (const auto& b : bonds) {
    pos = pos || b.h1 > 0.0;
    neg = neg || b.h1 < 0.0;
    h0_ok = h0_ok && b.h0 > 0.0;
  }
  const PauliSum h = tilde_heis_model(n_spins, bonds);
  const bool structural = h0_ok && !(pos && neg);
  if (structural) {
    out.verdict.method = VgpMethod::parity_argument;
    out.verdict.vgp = true;
    out.verdict.statements = bonds.size();
  }
  if (!structural || n_spins <= cross_check_cap) {
    const auto fe = f_eta(to_dense(h), 1.0);
    out.f_eta_relative = fe.relative;
    out.cross_checked = structural;
    if (!structural) {
      out.verdict.method = VgpMethod::spectral_fallback;
      out.verdict.vgp = fe.relative <= tol;
      if (!out.verdict.vgp)
        out.verdict.violations.push_back(
            {fmt::format("relative f_eta = {:.6e}", fe.relative), 0, 0, 0, 0.0});
    }
  }
  return out;
}

VgpVerdict check_gauge_consistency(const PMRForm& p, double tol) {
  VgpVerdict v;
  v.method = VgpMethod::gauge_consistency;
  const Mask all = p.n_spins == 32 ? ~Mask{0} : (Mask{1} << p.n_spins) - 1;
  for (const auto& comp : all_components(p)) {
    LocalGraph g;
    g.states = comp.states;
    g.edges.resize(comp.size());
    for (std::size_t a = 0; a < comp.size(); ++a)
      for (const auto& e : comp.adjacency[a]) g.edges[a].push_back({e.to, e.weight});
    gauge_check(g, all, tol, v);
  }
  return v;
}

nlohmann::json to_json(const VgpVerdict& v) {
  nlohmann::json j = {{"vgp", v.vgp}, {"method", to_string(v.method)}, {"statements", v.statements},
                     {"max_violation", v.max_violation}};
  j["violations"] = nlohmann::json::array();
  for (const auto& x : v.violations)
    j["violations"].push_back({{"description", x.description},
                               {"sites", x.sites},
                               {"alpha", x.alpha},
                               {"alpha_prime", x.alpha_prime},
                               {"phase_residue", x.phase_residue}});
  return j;
}

}  // namespace vgp
