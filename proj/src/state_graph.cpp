#include "vgp/state_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "vgp/errors.hpp"

namespace vgp {

StateGraph build_graph(const PMRForm& p, State root, std::size_t component_cap) {
  if (p.n_spins < 32 && root >> p.n_spins)
    throw ValidationError(fmt::format("root state {} outside a {}-spin basis", root, p.n_spins));
  StateGraph g;
  g.n_spins = p.n_spins;
  g.states.push_back(root);
  g.index.emplace(root, 0);
  for (std::size_t head = 0; head < g.states.size(); ++head) {
    const State z = g.states[head];
    std::vector<GraphEdge> edges;
    for (int j = 0; j < static_cast<int>(p.offdiag.size()); ++j) {
      const Edge e = edge_weight(p, j, z);
      if (e.weight == cplx(0.0, 0.0)) continue;
      auto [it, fresh] = g.index.emplace(e.to, static_cast<int>(g.states.size()));
      if (fresh) {
        if (g.states.size() >= component_cap)
          throw GuardError("component_size",
                           fmt::format("state-graph component exceeds {} states", component_cap));
        g.states.push_back(e.to);
      }
      edges.push_back({it->second, j, e.weight});
    }
    g.adjacency.push_back(std::move(edges));
  }
  return g;
}

std::vector<StateGraph> all_components(const PMRForm& p, std::size_t component_cap) {
  if (p.n_spins > 24) throw GuardError("basis_size", "full-basis graph limited to 24 spins");
  const State dim = State{1} << p.n_spins;
  std::vector<char> seen(dim, 0);
  std::vector<StateGraph> out;
  for (State z = 0; z < dim; ++z) {
    if (seen[z]) continue;
    out.push_back(build_graph(p, z, component_cap));
    for (State s : out.back().states) seen[s] = 1;
  }
  return out;
}

std::vector<std::vector<int>> fundamental_generators(const PMRForm& p, int max_len) {
  if (p.offdiag.empty()) return {};
  return gf2_circuits(p.x_masks(), max_len);
}

int default_cycle_bound(int n_spins) { return std::min(2 * n_spins, 12); }

namespace {

double wrapped_phase(cplx w, int q) { return std::arg(q % 2 ? -w : w); }

class CycleSearch {
 public:
  CycleSearch(const StateGraph& g, int Q, std::size_t cap)
      : g_(g), Q_(Q), cap_(cap), adj_count_(g.size(), 0), on_path_(g.size(), 0),
        adj_start_(g.size(), 0) {}

  std::vector<FundamentalCycle> run() {
    // 2-cycles, one per undirected edge
    for (int a = 0; a < static_cast<int>(g_.size()); ++a)
      for (const auto& e : g_.adjacency[a])
        if (g_.states[a] < g_.states[e.to]) {
          const cplx back = weight(e.to, a);
          emit({g_.states[a], {e.perm, e.perm}, e.weight * back, 0.0});
        }
    if (Q_ < 3) return std::move(out_);
    // visit starts in increasing state order; path vertices must exceed the start
    std::vector<int> order(g_.size());
    for (int i = 0; i < static_cast<int>(order.size()); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [this](int a, int b) { return g_.states[a] < g_.states[b]; });
    rank_.assign(g_.size(), 0);
    for (int r = 0; r < static_cast<int>(order.size()); ++r) rank_[order[r]] = r;
    for (int s : order) {
      for (const auto& e : g_.adjacency[s]) adj_start_[e.to] = 1;
      push(s);
      extend(s);
      pop(s);
      for (const auto& e : g_.adjacency[s]) adj_start_[e.to] = 0;
    }
    return std::move(out_);
  }

 private:
  cplx weight(int from, int to) const {
    for (const auto& e : g_.adjacency[from])
      if (e.to == to) return e.weight;
    return 0.0;
  }
  int perm(int from, int to) const {
    for (const auto& e : g_.adjacency[from])
      if (e.to == to) return e.perm;
    return -1;
  }

  void push(int v) {
    path_.push_back(v);
    on_path_[v] = 1;
    for (const auto& e : g_.adjacency[v]) ++adj_count_[e.to];
  }
  void pop(int v) {
    path_.pop_back();
    on_path_[v] = 0;
    for (const auto& e : g_.adjacency[v]) --adj_count_[e.to];
  }

  void extend(int s) {
    const int last = path_.back();
    const int k = static_cast<int>(path_.size()) - 1;  // edges on the path so far
    for (const auto& e : g_.adjacency[last]) {
      const int v = e.to;
      if (rank_[v] <= rank_[s] || on_path_[v]) continue;
      if (k == 0) {
        push(v);
        extend(s);
        pop(v);
        continue;
      }
      if (adj_start_[v]) {
        // v closes the cycle; it may touch no path vertex other than s and last
        if (adj_count_[v] == 2 && k + 2 <= Q_ && rank_[path_[1]] < rank_[v]) close(v);
      } else if (adj_count_[v] == 1 && k + 3 <= Q_) {
        push(v);
        extend(s);
        pop(v);
      }
    }
  }

  void close(int v) {
    std::vector<int> cyc = path_;
    cyc.push_back(v);
    const int q = static_cast<int>(cyc.size());
    auto walk = [&](const std::vector<int>& verts) {
      FundamentalCycle c;
      c.start = g_.states[verts[0]];
      c.weight = 1.0;
      for (int i = 0; i < q; ++i) {
        const int a = verts[i], b = verts[(i + 1) % q];
        c.indices.push_back(perm(a, b));
        c.weight *= weight(a, b);
      }
      return c;
    };
    std::vector<int> rev(cyc.size());
    rev[0] = cyc[0];
    std::reverse_copy(cyc.begin() + 1, cyc.end(), rev.begin() + 1);
    FundamentalCycle fwd = walk(cyc), bwd = walk(rev);
    emit(bwd.indices < fwd.indices ? std::move(bwd) : std::move(fwd));
  }

  void emit(FundamentalCycle c) {
    if (out_.size() >= cap_)
      throw GuardError("cycle_count", fmt::format("cycle enumeration exceeds {} cycles", cap_));
    c.phase = wrapped_phase(c.weight, c.q());
    out_.push_back(std::move(c));
  }

  const StateGraph& g_;
  int Q_;
  std::size_t cap_;
  std::vector<int> adj_count_;
  std::vector<char> on_path_;
  std::vector<char> adj_start_;
  std::vector<int> rank_;
  std::vector<int> path_;
  std::vector<FundamentalCycle> out_;
};

}  // namespace

std::vector<FundamentalCycle> enumerate_cycles(const StateGraph& g, int Q,
                                               std::size_t cycle_cap) {
  if (Q < 2) throw ValidationError("cycle length bound Q must be at least 2");
  auto cycles = CycleSearch(g, Q, cycle_cap).run();
  std::sort(cycles.begin(), cycles.end(), [](const FundamentalCycle& a, const FundamentalCycle& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.indices < b.indices;
  });
  return cycles;
}

int graph_diameter(const StateGraph& g) {
  const int n = static_cast<int>(g.size());
  int best = 0;
  std::vector<int> dist(n);
  std::deque<int> queue;
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const int a = queue.front();
      queue.pop_front();
      for (const auto& e : g.adjacency[a])
        if (dist[e.to] < 0) {
          dist[e.to] = dist[a] + 1;
          best = std::max(best, dist[e.to]);
          queue.push_back(e.to);
        }
    }
  }
  return best;
}

std::string cycles_to_csv(const std::vector<FundamentalCycle>& cycles) {
  std::string out = "start,q,indices,weight_re,weight_im,phase\n";
  for (const auto& c : cycles)
    out += fmt::format("{},{},{},{:.17g},{:.17g},{:.17g}\n", c.start, c.q(),
                       fmt::join(c.indices, " "), c.weight.real(), c.weight.imag(), c.phase);
  return out;
}

}  // namespace vgp
