#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "vgp/pmr.hpp"

namespace vgp {

inline constexpr std::size_t kDefaultComponentCap = std::size_t{1} << 16;
inline constexpr std::size_t kDefaultCycleCap = 2'000'000;

struct GraphEdge {
  int to;      // local index of the neighbor
  int perm;    // index into PMRForm::offdiag
  cplx weight;  // <neighbor| D_perm P_perm |state>
};

/// Connected component of the computational state graph.
struct StateGraph {
  int n_spins = 0;
  std::vector<State> states;                   // breadth-first order from the root
  std::vector<std::vector<GraphEdge>> adjacency;
  std::unordered_map<State, int> index;

  std::size_t size() const { return states.size(); }
};

/// Breadth-first closure of `root`. Edges with an exactly zero weight are omitted.
StateGraph build_graph(const PMRForm& p, State root,
                       std::size_t component_cap = kDefaultComponentCap);

/// All components of the graph over the full basis, smallest root first.
std::vector<StateGraph> all_components(const PMRForm& p,
                                       std::size_t component_cap = kDefaultComponentCap);

/// Minimal permutation-index multisets whose product is the identity (plus every {j, j}).
std::vector<std::vector<int>> fundamental_generators(const PMRForm& p, int max_len);

struct FundamentalCycle {
  State start = 0;
  std::vector<int> indices;  // i_1 ... i_q
  cplx weight;               // product of edge weights along the walk
  double phase = 0.0;        // arg((-1)^q weight) in (-pi, pi]

  int q() const { return static_cast<int>(indices.size()); }
};

/// Default cycle-length bound min(2N, 12).
int default_cycle_bound(int n_spins);

/// Chordless closed walks of length 2..Q. Each cycle is reported once, starting at its
/// smallest state and oriented so that its index sequence is lexicographically smallest.
/// Throws GuardError once more than `cycle_cap` cycles have been produced.
std::vector<FundamentalCycle> enumerate_cycles(const StateGraph& g, int Q,
                                               std::size_t cycle_cap = kDefaultCycleCap);

/// Longest shortest path (in edges) between two states of the component.
int graph_diameter(const StateGraph& g);

/// CSV with header start,q,indices,weight_re,weight_im,phase; indices are space-separated.
std::string cycles_to_csv(const std::vector<FundamentalCycle>& cycles);

}  // namespace vgp
