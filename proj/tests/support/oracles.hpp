#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "support/chain_gen.hpp"

namespace signstab::testing {

/// Exhaustive elementary-cycle enumeration (length >= 3) by DFS over simple
/// paths. 0-based adjacency in, 1-based canonical cycles out. Only for tiny
/// graphs; the independent oracle for the Johnson implementation.
inline std::vector<std::vector<int>> brute_force_long_cycles(
    const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<std::vector<int>> cycles;
  std::vector<int> path;
  std::vector<bool> on_path(static_cast<std::size_t>(n), false);

  std::function<void(int, int)> dfs = [&](int start, int v) {
    path.push_back(v);
    on_path[static_cast<std::size_t>(v)] = true;
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (w == start) {
        if (path.size() >= 3) {
          std::vector<int> cycle;
          for (int u : path) cycle.push_back(u + 1);
          cycles.push_back(std::move(cycle));
        }
      } else if (w > start && !on_path[static_cast<std::size_t>(w)]) {
        dfs(start, w);
      }
    }
    path.pop_back();
    on_path[static_cast<std::size_t>(v)] = false;
  };

  for (int start = 0; start < n; ++start) dfs(start, start);
  std::sort(cycles.begin(), cycles.end());
  return cycles;
}

/// Independent weight oracle: the product of oriented asymmetry values along
/// the unique pair-tree path from the unit node (the root's partner) to
/// `node`, multiplied in path order. Uses only the generator's bookkeeping.
inline double path_product_weight(const GeneratedChain& g, int node) {
  std::map<int, std::vector<int>> mates;
  for (auto [i, j] : g.pairs) {
    mates[i].push_back(j);
    mates[j].push_back(i);
  }
  std::vector<int> path;  // node sequence from unit node to target
  std::function<bool(int, int)> dfs = [&](int v, int from) {
    path.push_back(v);
    if (v == node) return true;
    for (int w : mates[v]) {
      if (w == from) continue;
      if (dfs(w, v)) return true;
    }
    path.pop_back();
    return false;
  };
  if (!dfs(g.root_partner, 0)) return std::numeric_limits<double>::quiet_NaN();

  double product = 1.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    int owner = path[k];
    int mate = path[k - 1];
    // Oriented ratio from the coupling table, independent of the network code.
    double ratio = -g.coupling.at({mate, owner}) / g.coupling.at({owner, mate});
    product = product * ratio;
  }
  return product;
}

}  // namespace signstab::testing
